#ifndef PSV_CONFIG_HPP
#define PSV_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psv/density.hpp"
#include "psv/estimate.hpp"
#include "psv/kde.hpp"

namespace psv {

enum class Method { mcs, mcmc, is_mcmc, psv_mcmc, psv_hmc };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

/// Which probability a PSV row reports.
enum class PsvCombine { direct, variational, mean };

std::string_view to_string(PsvCombine combine);
std::optional<PsvCombine> parse_psv_combine(std::string_view text);

struct DensitySpec {
  std::string kind = "normal";  // normal | mixture | uniform
  double x_t = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
  double alpha = 0.05;
  double nu = 2.5;
  double f1 = 0.998;
  double lower = 0.0;
  double upper = 1.0;
};

TargetDensity make_target(const DensitySpec& spec);

/// Every tunable of a run. Optional members are filled in by resolve().
struct RunConfig {
  DensitySpec density;

  std::vector<Method> methods{Method::mcs, Method::mcmc, Method::is_mcmc, Method::psv_mcmc,
                              Method::psv_hmc};
  std::size_t n_per_repeat = 10000;
  std::map<Method, std::size_t> n_per_method;
  std::size_t repeats = 10;
  double burn_in_fraction = 0.1;
  std::uint64_t master_seed = 1;
  /// 0 means one worker per hardware thread. Results do not depend on it.
  std::size_t threads = 0;

  std::optional<double> proposal_scale;
  bool mcmc_tune = false;
  double mcmc_target_acceptance = 0.25;

  std::optional<double> epsilon;
  std::optional<double> ell;
  double mass = 1.0;
  bool hmc_tune = true;
  double hmc_target_acceptance = 0.67;

  EdgeMode edge_mode = EdgeMode::reflection;
  std::optional<double> bandwidth_override;
  bool kde_truncate = true;

  /// The direct estimator; the variational one is far noisier on chains.
  PsvCombine psv_combine = PsvCombine::direct;

  std::optional<double> is_sigma;
  bool is_direct_sampling = false;

  SamplerKind sample_sampler = SamplerKind::hmc;
  std::vector<SamplerKind> diag_samplers{SamplerKind::mcmc, SamplerKind::hmc};
  std::optional<double> diag_grid_min;
  std::optional<double> diag_grid_max;
  std::size_t diag_grid_points = 200;

  std::string output_dir = "out";

  std::size_t n_for(Method method) const;
  PsvConfig psv_config(SamplerKind sampler, std::size_t n) const;
};

/// Parses the flat `section.key = value` format. Unknown, duplicate or
/// malformed keys raise ConfigError naming the key. Validates the result.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Fills every defaulted optional from the density (proposal scale, HMC
/// step and length, IS width, diag grid).
RunConfig resolve(RunConfig config);

/// Echo of every effective value in parse_config's format.
std::string render_config(const RunConfig& config);

void validate(const RunConfig& config);

/// Built-in reproduction configs for benchmark tables 1-3.
RunConfig bench_config(int table);
/// Reference exceedance probability printed in each table.
double bench_reference_probability(int table);

}  // namespace psv

#endif  // PSV_CONFIG_HPP
