#ifndef PSV_HMC_HPP
#define PSV_HMC_HPP

#include <cstddef>
#include <cstdint>

#include "psv/chain.hpp"
#include "psv/density.hpp"
#include "psv/rng.hpp"
#include "psv/sampler.hpp"

namespace psv {

/// Leapfrog step size, trajectory length and particle mass. The momentum
/// is drawn from Normal(0, sqrt(mass)) at every proposal.
struct HmcParams {
  double epsilon = 0.1;
  double ell = 1.0;
  double mass = 1.0;

  /// round(ell / epsilon), at least 1.
  std::size_t n_steps() const;
  void validate() const;
};

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

struct Trajectory {
  PhasePoint end;
  /// Some intermediate position left the support of g'.
  bool divergent = false;
};

struct HmcTransition {
  double q_next = 0.0;
  bool accepted = false;
  /// H(end) - H(start); +inf for a divergent trajectory.
  double delta_h = 0.0;
  double accept_prob = 0.0;
};

/// H(q, p) = p^2 / (2m) - log g'(q); +inf outside the support.
double hamiltonian(const TargetDensity& target, PhasePoint point, const HmcParams& params);

/// n_steps kick-drift-kick leapfrog updates under U(q) = -log g'(q).
Trajectory leapfrog(const TargetDensity& target, PhasePoint start, const HmcParams& params);

/// min(1, exp(-delta_h)); NaN rejects.
double energy_acceptance(double delta_h);

HmcTransition hmc_step(const TargetDensity& target, double q, const HmcParams& params,
                       Rng& rng);

struct HmcChainOptions {
  /// Adapt epsilon during burn-in (n_steps held fixed), then freeze it.
  bool tune = true;
  double target_acceptance = 0.67;
  TuneOptions tuning{};
  std::size_t probe_budget = 64;
};

/// HMC chain of n transitions; the chain starts at x_T + ell.
Chain run_hmc_chain(const TargetDensity& target, const HmcParams& params, std::size_t n,
                    std::size_t burn_in, std::uint64_t seed,
                    const HmcChainOptions& options = {});

/// Default parameters for a density of spread sigma: epsilon = 0.1 sigma,
/// ell = sigma, unit mass.
HmcParams default_hmc_params(double sigma);

}  // namespace psv

#endif  // PSV_HMC_HPP
