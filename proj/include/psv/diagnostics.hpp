#ifndef PSV_DIAGNOSTICS_HPP
#define PSV_DIAGNOSTICS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psv/chain.hpp"
#include "psv/config.hpp"
#include "psv/density.hpp"
#include "psv/kde.hpp"

namespace psv {

/// Repeat-level summary: mean estimate, fractional error and unitary cov.
struct RepeatedRunReport {
  std::string method;
  std::vector<double> estimates;
  std::size_t n_per_repeat = 0;
  std::size_t repeats = 0;
  std::size_t n_total = 0;
  double p_mean = 0.0;
  /// Population standard deviation over p_mean.
  double delta = 0.0;
  /// delta * sqrt(n_total).
  double big_delta = 0.0;
  bool degenerate = false;
  std::optional<double> acceptance_rate;
  /// Mean direct / variational probabilities (PSV methods only).
  std::optional<double> p_direct;
  std::optional<double> p_variational;
  /// Set when the method failed; the other fields are then meaningless.
  std::optional<std::string> error;
};

/// Mean, delta = population sd / mean and big_delta = delta * sqrt(n_total).
/// A zero mean marks the report degenerate with NaN delta.
RepeatedRunReport aggregate(std::span<const double> estimates, std::size_t n_total);

struct BenchmarkResult {
  std::optional<double> analytic;
  std::vector<RepeatedRunReport> reports;
  double runtime_seconds = 0.0;
};

/// Runs every configured method `repeats` times with seeds derived from
/// (master_seed, method, repeat). A failing method is recorded and the
/// remaining ones still run.
BenchmarkResult run_benchmark(const RunConfig& config);

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Exceptions are rethrown in index order after all finish.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

struct GridSpec {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t points = 100;

  double at(std::size_t i) const;
};

struct ProfileRow {
  double x = 0.0;
  double empirical = 0.0;
  double analytic = 0.0;
};

struct ConvergenceProfile {
  std::vector<ProfileRow> rows;
  double sup_norm = 0.0;
  /// Trapezoidal L1 distance over the grid (0 for a single point).
  double l1 = 0.0;
};

/// g'(x) / P for the analytic tail P. Throws ConfigError if P is unknown.
double analytic_truncated_density(const TargetDensity& target, double x);

/// P{X <= x | X >= x_T} from the analytic tail. Throws ConfigError if the
/// tail is unknown.
double analytic_truncated_cdf(const TargetDensity& target, double x);

ConvergenceProfile convergence_profile(const KdeModel& h, const TargetDensity& target,
                                       const GridSpec& grid);
ConvergenceProfile convergence_profile(const Chain& chain, const TargetDensity& target,
                                       const GridSpec& grid, const KdeOptions& kde = {});

/// Kolmogorov-Smirnov distance between the empirical CDF and `cdf`.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

}  // namespace psv

#endif  // PSV_DIAGNOSTICS_HPP
