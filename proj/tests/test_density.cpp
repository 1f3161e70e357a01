#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "psv/density.hpp"
#include "psv/errors.hpp"
#include "support.hpp"

using namespace psv;

TEST_CASE("log g' of a truncated normal") {
  const auto t = make_normal_target(0.0, 1.0, 0.0);
  CHECK(t.log_gprime(0.0) == doctest::Approx(-0.918938533204673).epsilon(1e-12));
  CHECK(t.log_gprime(-1e-12) == kNegInf);

  const auto t15 = make_normal_target(0.0, 5.0, 15.0);
  CHECK(t15.log_gprime(14.999) == kNegInf);
  CHECK(t15.gprime(14.999) == 0.0);
  CHECK(std::isfinite(t15.log_gprime(15.0)));
  CHECK(t15.log_gprime(std::nan("")) == kNegInf);
}

TEST_CASE("mixture log density at the Gaussian bump") {
  const auto t = make_mixture_target({}, 130.0);
  CHECK(t.log_gprime(185.0) == doctest::Approx(-7.60002438643207).epsilon(1e-12));
  CHECK(std::exp(t.log_gprime(185.0)) ==
        doctest::Approx(oracle::mixture_pdf(185.0)).epsilon(1e-12));
  CHECK(t.log_gprime(129.0) == kNegInf);
}

TEST_CASE("gradient of log g'") {
  const auto t15 = make_normal_target(0.0, 5.0, 15.0);
  CHECK(t15.grad_log_gprime(15.0) == doctest::Approx(-0.6));
  CHECK(make_normal_target(3.0, 2.0, kNegInf).grad_log_gprime(3.0) == 0.0);
  CHECK(std::isnan(t15.grad_log_gprime(10.0)));
}

TEST_CASE("gradient matches central differences at random points") {
  const auto normal = make_normal_target(0.0, 5.0, 15.0);
  const auto mixture = make_mixture_target({}, 130.0);
  std::mt19937_64 rng(7);
  for (const auto* t : {&normal, &mixture}) {
    const double lo = t->threshold() + 0.5;
    const double width = t == &normal ? 15.0 : 120.0;
    std::uniform_real_distribution<double> u(lo, lo + width);
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      const double fd = (t->log_gprime(x + h) - t->log_gprime(x - h)) / (2.0 * h);
      const double g = t->grad_log_gprime(x);
      CAPTURE(x);
      CHECK(std::abs(fd - g) <= 1e-4 * std::max(std::abs(g), 1e-3));
    }
  }
}

TEST_CASE("closed-form tails for the benchmark normals") {
  const double p15 = *make_normal_target(0.0, 5.0, 15.0).analytic_tail();
  const double p20 = *make_normal_target(0.0, 5.0, 20.0).analytic_tail();
  // Reference values as printed: four significant digits (truncated) and
  // five significant digits.
  CHECK(std::floor(p15 * 1e6) == 1349.0);
  CHECK(p15 == doctest::Approx(1.3498980316300945e-3).epsilon(1e-12));
  CHECK(std::round(p20 * 1e9) == 31671.0);
  CHECK(p20 == doctest::Approx(3.167124183311992e-5).epsilon(1e-12));
}

TEST_CASE("analytic tails agree with quadrature of g'") {
  SUBCASE("normal") {
    for (double xt : {-3.0, 0.0, 7.5, 15.0, 20.0}) {
      const auto t = make_normal_target(0.0, 5.0, xt);
      const double q = oracle::integrate(
          [](double x) { return oracle::normal_pdf(x, 0.0, 5.0); }, xt, xt + 200.0);
      CHECK(*t.analytic_tail() == doctest::Approx(q).epsilon(1e-9));
    }
  }
  SUBCASE("mixture") {
    for (double xt : {50.0, 130.0, 160.0, 190.0}) {
      const auto t = make_mixture_target({}, xt);
      const double q = oracle::integrate_pieces(oracle::mixture_pdf,
                                                {xt, 175.0, 195.0, 400.0, 1000.0, 3000.0});
      const double q_bumpfree =
          oracle::integrate_pieces(oracle::mixture_pdf, {xt, 400.0, 1000.0, 3000.0});
      CAPTURE(xt);
      // Piecewise rule resolving the bump, vs one that has to find it.
      CHECK(q == doctest::Approx(q_bumpfree).epsilon(1e-8));
      CHECK(*t.analytic_tail() == doctest::Approx(q).epsilon(1e-9));
    }
    CHECK(*make_mixture_target({}, 130.0).analytic_tail() ==
          doctest::Approx(2.5332010567356706e-2).epsilon(1e-10));
    CHECK(*make_mixture_target({}, 160.0).analytic_tail() ==
          doctest::Approx(8.830385774575590e-3).epsilon(1e-10));
  }
}

TEST_CASE("mixture pdf integrates to one") {
  const double total =
      oracle::integrate_pieces([](double x) { return std::exp(GammaGaussianMixture({}).log_pdf(x)); },
                               {0.0, 20.0, 175.0, 195.0, 400.0, 1000.0, 3000.0});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("criteria function is an idempotent indicator") {
  const CriteriaFunction c(15.0);
  for (double x : {-1.0, 14.999, 15.0, 15.0001, 1e9}) {
    CHECK(c(x) * c(x) == c(x));
    CHECK((c(x) == 0.0 || c(x) == 1.0));
  }
  CHECK(c(15.0) == 1.0);
  CHECK(c(14.999) == 0.0);
  CHECK_THROWS_AS(CriteriaFunction(std::nan("")), ConfigError);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(NormalDensity(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(NormalDensity(0.0, -1.0), ConfigError);
  CHECK_THROWS_AS(GammaGaussianMixture({.rate = 0.0}), ConfigError);
  CHECK_THROWS_AS(GammaGaussianMixture({.gamma_weight = 1.5}), ConfigError);
  CHECK_THROWS_AS(UniformDensity(1.0, 1.0), ConfigError);
}

TEST_CASE("uniform density") {
  const UniformDensity u(0.0, std::exp(1.0));
  CHECK(u.log_pdf(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(u.log_pdf(-0.1) == kNegInf);
  CHECK(u.grad_log_pdf(1.0) == 0.0);
  CHECK(*u.upper_tail(std::exp(1.0) / 2) == doctest::Approx(0.5));
}

TEST_CASE("sampling from the mixture reproduces its tail") {
  const auto t = make_mixture_target({}, 160.0);
  Rng rng(11);
  const int n = 400000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += t.criteria().contains(t.base().sample(rng));
  const double p = *t.analytic_tail();
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(hits / double(n) - p) < 4 * se);
}
