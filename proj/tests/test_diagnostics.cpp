#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "psv/diagnostics.hpp"
#include "psv/errors.hpp"
#include "psv/hmc.hpp"
#include "psv/sampler.hpp"

using namespace psv;

TEST_CASE("aggregate arithmetic") {
  const std::vector<double> same(10, 0.25);
  const RepeatedRunReport flat = aggregate(same, 1000);
  CHECK(flat.p_mean == 0.25);
  CHECK(flat.delta == 0.0);
  CHECK(flat.big_delta == 0.0);

  const std::vector<double> spread{0.9, 1.1};
  const RepeatedRunReport r = aggregate(spread, 100);
  CHECK(r.p_mean == doctest::Approx(1.0));
  CHECK(r.delta == doctest::Approx(0.1));
  CHECK(r.big_delta == doctest::Approx(1.0));
  CHECK(r.repeats == 2);
}

TEST_CASE("aggregate is permutation invariant") {
  std::vector<double> xs{3e-3, 1.1e-3, 7e-4, 2.2e-3, 1.3e-3, 9.9e-4, 1.7e-3};
  const RepeatedRunReport a = aggregate(xs, 70000);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(xs.begin(), xs.end(), rng);
    const RepeatedRunReport b = aggregate(xs, 70000);
    CHECK(a.p_mean == b.p_mean);
    CHECK(a.delta == b.delta);
  }
}

TEST_CASE("big delta depends only on the total budget") {
  const std::vector<double> xs{1.0, 1.2, 0.8, 1.1};
  CHECK(aggregate(xs, 40000).big_delta == aggregate(xs, 40000).big_delta);
  CHECK(aggregate(xs, 40000).big_delta == doctest::Approx(aggregate(xs, 10000).big_delta * 2.0));
}

TEST_CASE("degenerate and invalid estimate lists") {
  const std::vector<double> zeros(5, 0.0);
  const RepeatedRunReport z = aggregate(zeros, 50);
  CHECK(z.degenerate);
  CHECK(std::isnan(z.delta));
  const std::vector<double> bad{1.0, std::nan("")};
  CHECK_THROWS_AS(aggregate(bad, 2), ConsistencyError);
  CHECK_THROWS(aggregate(std::vector<double>{}, 2));
}

TEST_CASE("parallel_for covers every index and rethrows in order") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 7 || i == 4) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "4");
  }
}

TEST_CASE("benchmark is deterministic and thread-count independent") {
  RunConfig c;
  c.density = {.kind = "normal", .x_t = 10.0, .mu = 0.0, .sigma = 5.0};
  c.n_per_repeat = 2000;
  c.repeats = 4;
  c.master_seed = 5;
  c.threads = 1;
  const BenchmarkResult a = run_benchmark(c);
  c.threads = 3;
  const BenchmarkResult b = run_benchmark(c);
  REQUIRE(a.reports.size() == 5);
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].estimates == b.reports[i].estimates);
    CHECK_FALSE(a.reports[i].error);
  }
  CHECK(*a.analytic == doctest::Approx(0.0227501319481792).epsilon(1e-12));
}

TEST_CASE("a failing method does not stop the others") {
  RunConfig c;
  c.density = {.kind = "uniform", .x_t = 5.0, .lower = 0.0, .upper = 1.0};
  c.methods = {Method::mcs, Method::psv_hmc};
  c.n_per_repeat = 500;
  c.repeats = 2;
  const BenchmarkResult r = run_benchmark(c);
  REQUIRE(r.reports.size() == 2);
  CHECK_FALSE(r.reports[0].error);
  CHECK(r.reports[0].degenerate);
  CHECK(r.reports[1].error);
}

TEST_CASE("convergence profile") {
  const auto t = make_normal_target(0.0, 5.0, 15.0);
  const KdeModel h({15.5, 16.0, 17.0}, 0.5, EdgeMode::reflection, 15.0);
  const ConvergenceProfile one = convergence_profile(h, t, {16.0, 16.0, 1});
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].x == 16.0);
  CHECK(one.l1 == 0.0);
  CHECK(one.sup_norm == doctest::Approx(std::abs(h(16.0) - analytic_truncated_density(t, 16.0))));

  const ConvergenceProfile many = convergence_profile(h, t, {15.0, 25.0, 101});
  CHECK(many.rows.size() == 101);
  CHECK(many.rows.back().x == 25.0);
  CHECK(many.l1 > 0.0);
}

TEST_CASE("hmc profile beats metropolis near the peak") {
  // Single chains are noisy; compare the mean sup-norm over several seeds.
  const auto t = make_normal_target(0.0, 5.0, 15.0);
  const GridSpec grid{15.0, 30.0, 301};
  ChainOptions mopts;
  mopts.tune = true;
  double sup_h = 0.0, sup_m = 0.0;
  for (std::uint64_t seed = 1000; seed < 1032; ++seed) {
    const Chain h = run_hmc_chain(t, default_hmc_params(5.0), 11000, 1000, seed);
    const Chain m = run_chain(t, {5.0}, 11000, 1000, seed, mopts);
    sup_h += convergence_profile(h, t, grid).sup_norm;
    sup_m += convergence_profile(m, t, grid).sup_norm;
  }
  CAPTURE(sup_h / 32);
  CAPTURE(sup_m / 32);
  CHECK(sup_h < sup_m);
}

TEST_CASE("analytic truncated density and cdf") {
  const auto t = make_normal_target(0.0, 5.0, 15.0);
  CHECK(analytic_truncated_cdf(t, 15.0) == 0.0);
  CHECK(analytic_truncated_cdf(t, 14.0) == 0.0);
  CHECK(analytic_truncated_cdf(t, 1e3) == doctest::Approx(1.0));
  CHECK(analytic_truncated_density(t, 14.0) == 0.0);
}

TEST_CASE("ks distance") {
  const std::vector<double> one{0.5};
  CHECK(ks_distance(one, [](double x) { return std::clamp(x, 0.0, 1.0); }) == 0.5);
  const std::vector<double> grid{0.125, 0.375, 0.625, 0.875};
  CHECK(ks_distance(grid, [](double x) { return std::clamp(x, 0.0, 1.0); }) ==
        doctest::Approx(0.125));
}
