#ifndef PSV_ESTIMATE_HPP
#define PSV_ESTIMATE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "psv/chain.hpp"
#include "psv/density.hpp"
#include "psv/hmc.hpp"
#include "psv/kde.hpp"
#include "psv/sampler.hpp"

namespace psv {

enum class EstimatorKind { direct, variational };

/// Normalizing constant lambda of g' and the probability 1 / lambda.
struct LambdaEstimate {
  double lambda = 0.0;
  double probability = 0.0;
  EstimatorKind method = EstimatorKind::direct;
  std::size_t n_used = 0;
};

/// lambda = mean_i h_i / g'_i. Every g'_i must be positive.
LambdaEstimate direct_lambda(std::span<const double> h, std::span<const double> g);

/// lambda = sum_i h_i g'_i / sum_i g'_i^2 (least-squares fit of h by lambda g').
LambdaEstimate variational_lambda(std::span<const double> h, std::span<const double> g);

using Surrogate = std::function<double(double)>;

LambdaEstimate estimate_direct(std::span<const double> samples, const Surrogate& h,
                               const TargetDensity& target);
LambdaEstimate estimate_variational(std::span<const double> samples, const Surrogate& h,
                                    const TargetDensity& target);

/// Both estimators over the retained chain samples with h = the fitted KDE.
LambdaEstimate estimate_direct(const Chain& chain, const KdeModel& h,
                               const TargetDensity& target);
LambdaEstimate estimate_variational(const Chain& chain, const KdeModel& h,
                                    const TargetDensity& target);

/// (1/n) sum C(x_i).
double fraction_in_domain(std::span<const double> samples, const CriteriaFunction& criteria);

/// (1/n) sum C(x_i) f(x_i) / rho(x_i) for samples drawn from rho.
double importance_weighted_mean(std::span<const double> samples, const Density& weighting,
                                const TargetDensity& target);

/// Analogue Monte Carlo: n independent draws from the base density.
double estimate_mcs(const TargetDensity& target, std::size_t n, std::uint64_t seed);

/// Probability estimate from a Markov-chain based baseline.
struct ChainEstimate {
  double probability = 0.0;
  double acceptance_rate = 0.0;
};

struct BaselineOptions {
  double burn_in_fraction = 0.1;
  /// Random-walk proposal sd; defaults to the sampled density's scale.
  std::optional<double> proposal_scale;
};

/// Analogue Monte Carlo with Metropolis draws from the untruncated base.
ChainEstimate estimate_mcmc(const TargetDensity& target, std::size_t n, std::uint64_t seed,
                            const BaselineOptions& options = {});

struct IsOptions {
  BaselineOptions chain{};
  /// Width of the weighting Normal(x_T, sigma); defaults to base scale().
  std::optional<double> sigma;
  /// Draw the weighting density directly instead of through Metropolis.
  bool direct_sampling = false;
};

/// Importance sampling with the weighting density Normal(x_T, sigma).
ChainEstimate estimate_is_mcmc(const TargetDensity& target, std::size_t n,
                               std::uint64_t seed, const IsOptions& options = {});

enum class SamplerKind { mcmc, hmc };

std::string_view to_string(SamplerKind kind);
std::optional<SamplerKind> parse_sampler_kind(std::string_view text);

struct PsvConfig {
  SamplerKind sampler = SamplerKind::hmc;
  std::size_t n = 10000;
  double burn_in_fraction = 0.1;
  ProposalSpec proposal{};
  ChainOptions chain{};
  HmcParams hmc{};
  HmcChainOptions hmc_chain{};
  KdeOptions kde{};
};

struct PsvResult {
  LambdaEstimate direct;
  LambdaEstimate variational;
  double acceptance_rate = 0.0;
  double bandwidth = 0.0;
  bool tune_warning = false;

  /// Average of the two probability estimates.
  double mean_probability() const {
    return 0.5 * (direct.probability + variational.probability);
  }
};

/// burn_in = floor(fraction * n), clamped so at least one sample is kept.
std::size_t burn_in_count(std::size_t n, double fraction);

/// Draw a chain for g', fit the KDE surrogate, evaluate both estimators.
PsvResult run_psv(const TargetDensity& target, const PsvConfig& config, std::uint64_t seed);

/// The chain run_psv would draw; exposed for diagnostics and dumps.
Chain draw_chain(const TargetDensity& target, const PsvConfig& config, std::uint64_t seed);

}  // namespace psv

#endif  // PSV_ESTIMATE_HPP
