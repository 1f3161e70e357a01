#include "psv/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <numeric>
#include <thread>

#include "psv/errors.hpp"
#include "psv/estimate.hpp"
#include "psv/rng.hpp"

namespace psv {

RepeatedRunReport aggregate(std::span<const double> estimates, std::size_t n_total) {
  if (estimates.empty()) throw ConfigError("aggregate needs at least one estimate");
  for (double e : estimates) {
    if (!std::isfinite(e)) throw ConsistencyError("aggregate: non-finite estimate");
  }
  RepeatedRunReport r;
  r.estimates.assign(estimates.begin(), estimates.end());
  r.repeats = estimates.size();
  r.n_total = n_total;
  r.n_per_repeat = n_total / estimates.size();

  // Sorted summation makes the result independent of the input order.
  std::vector<double> sorted(estimates.begin(), estimates.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : sorted) ss += (e - mean) * (e - mean);
  const double sd = std::sqrt(ss / n);

  r.p_mean = mean;
  if (mean == 0.0) {
    r.degenerate = true;
    r.delta = std::numeric_limits<double>::quiet_NaN();
    r.big_delta = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.delta = sd / std::abs(mean);
    r.big_delta = r.delta * std::sqrt(static_cast<double>(n_total));
  }
  return r;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

struct RepeatOutcome {
  double probability = 0.0;
  std::optional<double> acceptance_rate;
  std::optional<double> p_direct;
  std::optional<double> p_variational;
};

RepeatOutcome run_once(const RunConfig& config, const TargetDensity& target, Method method,
                       std::uint64_t seed) {
  const std::size_t n = config.n_for(method);
  switch (method) {
    case Method::mcs:
      return {.probability = estimate_mcs(target, n, seed)};
    case Method::mcmc: {
      const auto e = estimate_mcmc(target, n, seed,
                                   {.burn_in_fraction = config.burn_in_fraction,
                                    .proposal_scale = config.proposal_scale});
      return {.probability = e.probability, .acceptance_rate = e.acceptance_rate};
    }
    case Method::is_mcmc: {
      IsOptions opts;
      opts.chain.burn_in_fraction = config.burn_in_fraction;
      opts.sigma = config.is_sigma;
      opts.direct_sampling = config.is_direct_sampling;
      const auto e = estimate_is_mcmc(target, n, seed, opts);
      return {.probability = e.probability, .acceptance_rate = e.acceptance_rate};
    }
    case Method::psv_mcmc:
    case Method::psv_hmc: {
      const SamplerKind kind =
          method == Method::psv_mcmc ? SamplerKind::mcmc : SamplerKind::hmc;
      const PsvResult r = run_psv(target, config.psv_config(kind, n), seed);
      double p = r.mean_probability();
      if (config.psv_combine == PsvCombine::direct) p = r.direct.probability;
      if (config.psv_combine == PsvCombine::variational) p = r.variational.probability;
      return {.probability = p,
              .acceptance_rate = r.acceptance_rate,
              .p_direct = r.direct.probability,
              .p_variational = r.variational.probability};
    }
  }
  throw ConfigError("unknown method");
}

std::optional<double> mean_of(const std::vector<RepeatOutcome>& outs,
                              std::optional<double> RepeatOutcome::*field) {
  if (outs.empty() || !(outs.front().*field)) return std::nullopt;
  double sum = 0.0;
  for (const auto& o : outs) sum += *(o.*field);
  return sum / static_cast<double>(outs.size());
}

}  // namespace

BenchmarkResult run_benchmark(const RunConfig& raw) {
  const auto started = std::chrono::steady_clock::now();
  const RunConfig config = resolve(raw);
  validate(config);
  const TargetDensity target = make_target(config.density);

  BenchmarkResult result;
  result.analytic = target.analytic_tail();
  for (Method method : config.methods) {
    const std::size_t n = config.n_for(method);
    std::vector<RepeatOutcome> outs(config.repeats);
    RepeatedRunReport report;
    try {
      parallel_for(config.repeats, config.threads, [&](std::size_t rep) {
        const std::uint64_t seed =
            derive_seed(config.master_seed, static_cast<std::uint64_t>(method) + 1, rep);
        outs[rep] = run_once(config, target, method, seed);
      });
      std::vector<double> estimates;
      for (const auto& o : outs) estimates.push_back(o.probability);
      report = aggregate(estimates, n * config.repeats);
      report.acceptance_rate = mean_of(outs, &RepeatOutcome::acceptance_rate);
      report.p_direct = mean_of(outs, &RepeatOutcome::p_direct);
      report.p_variational = mean_of(outs, &RepeatOutcome::p_variational);
    } catch (const std::exception& e) {
      report = RepeatedRunReport{};
      report.error = e.what();
      report.repeats = config.repeats;
      report.n_total = n * config.repeats;
    }
    report.method = std::string(to_string(method));
    report.n_per_repeat = n;
    result.reports.push_back(std::move(report));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

double GridSpec::at(std::size_t i) const {
  if (points <= 1) return lower;
  return lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(points - 1);
}

double analytic_truncated_density(const TargetDensity& target, double x) {
  const auto tail = target.analytic_tail();
  if (!tail || !(*tail > 0.0)) {
    throw ConfigError(fmt::format("no analytic tail available for {}", target.base().describe()));
  }
  return target.gprime(x) / *tail;
}

double analytic_truncated_cdf(const TargetDensity& target, double x) {
  const auto total = target.analytic_tail();
  if (!total || !(*total > 0.0)) {
    throw ConfigError(fmt::format("no analytic tail available for {}", target.base().describe()));
  }
  if (x < target.threshold()) return 0.0;
  return 1.0 - *target.base().upper_tail(x) / *total;
}

ConvergenceProfile convergence_profile(const KdeModel& h, const TargetDensity& target,
                                       const GridSpec& grid) {
  if (grid.points == 0) throw ConfigError("profile grid needs at least one point");
  ConvergenceProfile profile;
  profile.rows.reserve(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    profile.rows.push_back({x, h(x), analytic_truncated_density(target, x)});
  }
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& r = profile.rows[i];
    profile.sup_norm = std::max(profile.sup_norm, std::abs(r.empirical - r.analytic));
    if (i > 0) {
      const auto& prev = profile.rows[i - 1];
      profile.l1 += 0.5 * (r.x - prev.x) *
                    (std::abs(r.empirical - r.analytic) + std::abs(prev.empirical - prev.analytic));
    }
  }
  return profile;
}

ConvergenceProfile convergence_profile(const Chain& chain, const TargetDensity& target,
                                       const GridSpec& grid, const KdeOptions& kde) {
  return convergence_profile(fit_kde(chain, target.threshold(), kde), target, grid);
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace psv
