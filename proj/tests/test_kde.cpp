#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "psv/errors.hpp"
#include "psv/hmc.hpp"
#include "psv/kde.hpp"
#include "support.hpp"

using namespace psv;

namespace {

constexpr double kPhi0 = 0.398942280401432678;

/// Integral of h over [lo, hi] in bandwidth-sized pieces.
double integrate_kde(const KdeModel& h, double lo, double hi) {
  const double step = h.bandwidth();
  double sum = 0.0;
  for (double a = lo; a < hi; a += step) {
    sum += oracle::integrate([&](double x) { return h(x); }, a, std::min(a + step, hi));
  }
  return sum;
}

std::vector<double> random_sample(std::uint64_t seed, double boundary, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(0.8);
  std::vector<double> xs(n);
  for (double& x : xs) x = boundary + e(rng);
  return xs;
}

}  // namespace

TEST_CASE("silverman bandwidth") {
  CHECK(silverman_bandwidth(1.0, 1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(silverman_bandwidth(5.0, 10000) == doctest::Approx(0.713201936607501).epsilon(1e-12));
  CHECK_THROWS_AS(silverman_bandwidth(0.0, 100), DegenerateSampleError);
  CHECK_THROWS_AS(silverman_bandwidth(1.0, 0), ConfigError);
}

TEST_CASE("two distinct points give a valid model") {
  const std::vector<double> xs{1.0, 2.0};
  const KdeModel h = fit_kde(xs, kNegInf, {.edge_mode = EdgeMode::none});
  CHECK(h.bandwidth() == doctest::Approx(0.9 * std::sqrt(0.5) * std::pow(2.0, -0.2)));
  CHECK(h(1.5) > 0.0);
}

TEST_CASE("degenerate samples are rejected") {
  const std::vector<double> same(10, 3.0);
  CHECK_THROWS_AS(fit_kde(same, kNegInf), DegenerateSampleError);
  const std::vector<double> one{3.0};
  CHECK_THROWS_AS(fit_kde(one, kNegInf), DegenerateSampleError);
}

TEST_CASE("single-kernel values") {
  const KdeModel plain({0.0}, 1.0, EdgeMode::none, kNegInf);
  CHECK(plain(0.0) == doctest::Approx(kPhi0).epsilon(1e-15));
  CHECK(plain(0.7) == plain(-0.7));

  const double w = 0.3;
  const KdeModel reflected({2.0}, w, EdgeMode::reflection, 2.0);
  CHECK(reflected(2.0) == doctest::Approx(2.0 * kPhi0 / w).epsilon(1e-14));
  CHECK(reflected(1.999) == 0.0);

  const KdeModel rescaled({2.0}, w, EdgeMode::rescaling, 2.0);
  CHECK(rescaled(2.0) == doctest::Approx(2.0 * kPhi0 / w).epsilon(1e-14));
}

TEST_CASE("kde integrates to one in every edge mode") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const double b = 15.0;
    const std::vector<double> xs = random_sample(seed, b, 60);
    for (EdgeMode mode : {EdgeMode::none, EdgeMode::reflection, EdgeMode::rescaling}) {
      for (bool truncate : {false, true}) {
        const KdeModel h = fit_kde(xs, b, {.edge_mode = mode, .truncate = truncate});
        const double top = *std::max_element(xs.begin(), xs.end()) + 12 * h.bandwidth();
        const double lo = mode == EdgeMode::none ? b - 12 * h.bandwidth() : b;
        CAPTURE(to_string(mode));
        CAPTURE(truncate);
        CHECK(integrate_kde(h, lo, top) == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("mass below the boundary") {
  const std::vector<double> xs{15.01, 15.05, 15.3, 16.0, 17.2};
  const KdeModel none = fit_kde(xs, 15.0, {.edge_mode = EdgeMode::none});
  CHECK(integrate_kde(none, 15.0 - 12 * none.bandwidth(), 15.0) > 0.05);
  for (EdgeMode mode : {EdgeMode::reflection, EdgeMode::rescaling}) {
    const KdeModel h = fit_kde(xs, 15.0, {.edge_mode = mode});
    CHECK(h(14.9999) == 0.0);
    CHECK(h(10.0) == 0.0);
  }
}

TEST_CASE("evaluation does not depend on sample order") {
  std::vector<double> xs = random_sample(9, 0.0, 500);
  const KdeModel a = fit_kde(xs, 0.0);
  std::mt19937_64 rng(1);
  std::shuffle(xs.begin(), xs.end(), rng);
  const KdeModel b = fit_kde(xs, 0.0);
  for (double x = 0.0; x < 6.0; x += 0.37) CHECK(a(x) == b(x));
}

TEST_CASE("batch evaluation agrees with pointwise evaluation") {
  const std::vector<double> xs = random_sample(4, 1.0, 300);
  const KdeModel h = fit_kde(xs, 1.0);
  std::vector<double> queries(xs.begin(), xs.begin() + 50);
  queries.insert(queries.end(), xs.begin(), xs.begin() + 10);
  const std::vector<double> batch = h.evaluate(queries);
  for (std::size_t i = 0; i < queries.size(); ++i) CHECK(batch[i] == h(queries[i]));
}

TEST_CASE("kernel truncation is invisible at double precision") {
  const std::vector<double> xs = random_sample(5, 0.0, 2000);
  for (EdgeMode mode : {EdgeMode::none, EdgeMode::reflection, EdgeMode::rescaling}) {
    const KdeModel exact = fit_kde(xs, 0.0, {.edge_mode = mode, .truncate = false});
    const KdeModel fast = fit_kde(xs, 0.0, {.edge_mode = mode, .truncate = true});
    for (double x = 0.0; x < 10.0; x += 0.05) {
      CHECK(fast(x) == doctest::Approx(exact(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("kde of an hmc chain tracks the truncated normal") {
  const auto t = make_normal_target(0.0, 5.0, 15.0);
  const Chain c = run_hmc_chain(t, default_hmc_params(5.0), 11000, 1000, 12);
  const double tail = *t.analytic_tail();
  auto truth = [&](double x) { return t.gprime(x) / tail; };

  const KdeModel h = fit_kde(c, 15.0, {.edge_mode = EdgeMode::reflection});
  double worst = 0.0;
  for (double x = 15.0; x <= 30.0; x += 0.01) worst = std::max(worst, std::abs(h(x) - truth(x)));
  CHECK(worst < 0.1 * truth(15.0));

  // Without correction half of each boundary kernel is lost.
  const KdeModel plain = fit_kde(c, 15.0, {.edge_mode = EdgeMode::none});
  const double ratio = plain(15.0) / truth(15.0);
  CAPTURE(ratio);
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);
}
