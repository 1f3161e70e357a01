#ifndef PSV_SAMPLER_HPP
#define PSV_SAMPLER_HPP

#include <cstddef>
#include <cstdint>

#include "psv/chain.hpp"
#include "psv/density.hpp"

namespace psv {

/// Symmetric Gaussian random-walk proposal: x' = x + scale * N(0, 1).
struct ProposalSpec {
  double scale = 1.0;
};

/// min(1, r). NaN (both densities zero) rejects.
double metropolis_acceptance(double ratio);

/// min(1, pi(x') T(x', x) / (pi(x) T(x, x'))). A zero denominator with a
/// nonzero numerator accepts; 0/0 rejects.
double mh_acceptance(double pi_x, double pi_xp, double t_fwd, double t_rev);

/// Stochastic-approximation settings for burn-in scale adaptation.
///
/// Adaptation proceeds in batches; after batch k the scale is multiplied by
/// exp(gain / k * (batch_rate - target)). The final `window` steps run with
/// the scale frozen and measure the acceptance rate that is reported.
struct TuneOptions {
  std::size_t steps = 5000;
  std::size_t window = 500;
  std::size_t batch = 50;
  double gain = 10.0;
  double tolerance = 0.10;
};

struct TuneResult {
  double scale = 0.0;
  /// Acceptance over the first adaptation batch, i.e. at the input scale.
  double initial_rate = 0.0;
  /// Acceptance over the frozen trailing window.
  double window_rate = 0.0;
  /// True when window_rate misses target by more than the tolerance; scale
  /// is then the best one seen.
  bool warning = false;
};

struct ChainOptions {
  /// Adapt the proposal scale during burn-in, then freeze it.
  bool tune = false;
  double target_acceptance = 0.25;
  TuneOptions tuning{};
  /// Number of halvings of the start offset tried before giving up.
  std::size_t probe_budget = 64;
};

/// First chain state: x_T + offset when the threshold is finite (probing
/// closer to x_T if that point lies outside the support), otherwise the base
/// density's location. Throws InitializationError when nothing is found.
double initial_state(const TargetDensity& target, double offset,
                     std::size_t probe_budget = 64);

/// Random-walk Metropolis chain of n steps on g'(x). Deterministic in seed.
Chain run_chain(const TargetDensity& target, ProposalSpec proposal, std::size_t n,
                std::size_t burn_in, std::uint64_t seed, const ChainOptions& options = {});

TuneResult tune_proposal_scale(const TargetDensity& target, ProposalSpec initial,
                               double target_rate, std::uint64_t seed,
                               const TuneOptions& options = {});

}  // namespace psv

#endif  // PSV_SAMPLER_HPP
