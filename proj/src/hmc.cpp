#include "psv/hmc.hpp"

#include <cmath>
#include <fmt/format.h>

#include "adaptation.hpp"
#include "psv/errors.hpp"

namespace psv {

std::size_t HmcParams::n_steps() const {
  const double steps = std::round(ell / epsilon);
  return steps < 1.0 ? 1 : static_cast<std::size_t>(steps);
}

void HmcParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(epsilon)) throw ConfigError(fmt::format("hmc: epsilon must be > 0, got {}", epsilon));
  if (!positive(ell)) throw ConfigError(fmt::format("hmc: ell must be > 0, got {}", ell));
  if (!positive(mass)) throw ConfigError(fmt::format("hmc: mass must be > 0, got {}", mass));
}

HmcParams default_hmc_params(double sigma) {
  return HmcParams{.epsilon = 0.1 * sigma, .ell = sigma, .mass = 1.0};
}

double hamiltonian(const TargetDensity& target, PhasePoint point, const HmcParams& params) {
  const double log_g = target.log_gprime(point.q);
  if (log_g == kNegInf) return kPosInf;
  return point.p * point.p / (2.0 * params.mass) - log_g;
}

Trajectory leapfrog(const TargetDensity& target, PhasePoint start, const HmcParams& params) {
  const double eps = params.epsilon;
  const std::size_t steps = params.n_steps();
  double q = start.q;
  double p = start.p;
  // dU/dq = -grad log g'
  double grad = target.grad_log_gprime(q);
  if (std::isnan(grad)) return {{q, p}, true};
  for (std::size_t s = 0; s < steps; ++s) {
    p += 0.5 * eps * grad;
    q += eps * p / params.mass;
    if (!target.in_support(q)) return {{q, p}, true};
    grad = target.grad_log_gprime(q);
    p += 0.5 * eps * grad;
  }
  return {{q, p}, false};
}

double energy_acceptance(double delta_h) {
  if (std::isnan(delta_h)) return 0.0;
  if (delta_h <= 0.0) return 1.0;
  return metropolis_acceptance(std::exp(-delta_h));
}

HmcTransition hmc_step(const TargetDensity& target, double q, const HmcParams& params,
                       Rng& rng) {
  const PhasePoint start{q, std::sqrt(params.mass) * standard_normal(rng)};
  const Trajectory traj = leapfrog(target, start, params);
  const double u = uniform01(rng);

  HmcTransition out{.q_next = q, .accepted = false, .delta_h = kPosInf, .accept_prob = 0.0};
  if (traj.divergent) return out;
  out.delta_h = hamiltonian(target, traj.end, params) - hamiltonian(target, start, params);
  out.accept_prob = energy_acceptance(out.delta_h);
  if (u < out.accept_prob) {
    out.q_next = traj.end.q;
    out.accepted = true;
  }
  return out;
}

Chain run_hmc_chain(const TargetDensity& target, const HmcParams& params, std::size_t n,
                    std::size_t burn_in, std::uint64_t seed, const HmcChainOptions& options) {
  params.validate();
  if (n == 0 || burn_in >= n) {
    throw ConfigError(fmt::format("chain needs n > burn_in >= 0 (n={}, burn_in={})", n, burn_in));
  }

  Chain chain;
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.samples.reserve(n);
  chain.accepted.reserve(n);

  Rng rng(seed);
  double q = initial_state(target, params.ell, options.probe_budget);
  const std::size_t steps = params.n_steps();
  // Tuning rescales epsilon with n_steps fixed, so ell tracks epsilon.
  auto with_epsilon = [&](double eps) {
    HmcParams p = params;
    p.epsilon = eps;
    p.ell = eps * static_cast<double>(steps);
    return p;
  };
  auto record = [&](double eps) {
    const HmcTransition t = hmc_step(target, q, with_epsilon(eps), rng);
    q = t.q_next;
    chain.samples.push_back(q);
    chain.accepted.push_back(t.accepted ? 1 : 0);
    return t.accepted;
  };

  double eps = params.epsilon;
  std::size_t done = 0;
  if (options.tune && burn_in > 0) {
    const TuneResult tuned =
        detail::adapt_scale(eps, options.target_acceptance, burn_in, options.tuning, record);
    eps = tuned.scale;
    chain.tune_warning = tuned.warning;
    done = burn_in;
  }
  for (; done < n; ++done) record(eps);
  chain.kernel_scale = eps;
  return chain;
}

}  // namespace psv
