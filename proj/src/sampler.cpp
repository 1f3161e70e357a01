#include "psv/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "adaptation.hpp"
#include "psv/errors.hpp"

namespace psv {

std::size_t Chain::accepts() const {
  return static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), 1));
}

double Chain::acceptance_rate() const {
  if (retained_size() == 0) return 0.0;
  const auto first = accepted.begin() + static_cast<std::ptrdiff_t>(burn_in);
  return static_cast<double>(std::count(first, accepted.end(), 1)) /
         static_cast<double>(retained_size());
}

double metropolis_acceptance(double ratio) {
  if (std::isnan(ratio)) return 0.0;
  return std::clamp(ratio, 0.0, 1.0);
}

double mh_acceptance(double pi_x, double pi_xp, double t_fwd, double t_rev) {
  // Symmetric transitions cancel exactly.
  if (t_fwd == t_rev) return metropolis_acceptance(pi_xp / pi_x);
  const double num = pi_xp * t_rev;
  const double den = pi_x * t_fwd;
  if (den == 0.0) return num > 0.0 ? 1.0 : 0.0;
  return metropolis_acceptance(num / den);
}

double initial_state(const TargetDensity& target, double offset,
                     std::size_t probe_budget) {
  const double threshold = target.threshold();
  if (std::isfinite(threshold)) {
    double step = std::abs(offset);
    for (std::size_t k = 0; k <= probe_budget; ++k) {
      const double x = threshold + step;
      if (target.in_support(x)) return x;
      step *= 0.5;
    }
    if (target.in_support(threshold)) return threshold;
  }
  const double loc = target.base().location();
  if (target.in_support(loc)) return loc;
  throw InitializationError(
      fmt::format("chain could not enter the support of {} above x_T={} within {} probes",
                  target.base().describe(), threshold, probe_budget));
}

namespace {

class MetropolisKernel {
 public:
  MetropolisKernel(const TargetDensity& target, double x0, Rng& rng)
      : target_(target), rng_(rng), x_(x0), log_g_(target.log_gprime(x0)) {}

  bool step(double scale) {
    const double proposal = x_ + scale * standard_normal(rng_);
    const double log_gp = target_.log_gprime(proposal);
    const double alpha = metropolis_acceptance(std::exp(log_gp - log_g_));
    if (uniform01(rng_) < alpha) {
      x_ = proposal;
      log_g_ = log_gp;
      return true;
    }
    return false;
  }

  double state() const { return x_; }

 private:
  const TargetDensity& target_;
  Rng& rng_;
  double x_;
  double log_g_;
};

void check_scale(double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ConfigError(fmt::format("proposal scale must be finite and >= 0, got {}", scale));
  }
}

}  // namespace

Chain run_chain(const TargetDensity& target, ProposalSpec proposal, std::size_t n,
                std::size_t burn_in, std::uint64_t seed, const ChainOptions& options) {
  check_scale(proposal.scale);
  if (n == 0 || burn_in >= n) {
    throw ConfigError(fmt::format("chain needs n > burn_in >= 0 (n={}, burn_in={})", n, burn_in));
  }

  Chain chain;
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.samples.reserve(n);
  chain.accepted.reserve(n);

  Rng rng(seed);
  MetropolisKernel kernel(target, initial_state(target, proposal.scale, options.probe_budget),
                          rng);
  auto record = [&](double scale) {
    const bool accepted = kernel.step(scale);
    chain.samples.push_back(kernel.state());
    chain.accepted.push_back(accepted ? 1 : 0);
    return accepted;
  };

  double scale = proposal.scale;
  std::size_t done = 0;
  if (options.tune && burn_in > 0) {
    const TuneResult tuned = detail::adapt_scale(scale, options.target_acceptance, burn_in,
                                                 options.tuning, record);
    scale = tuned.scale;
    chain.tune_warning = tuned.warning;
    done = burn_in;
  }
  for (; done < n; ++done) record(scale);
  chain.kernel_scale = scale;
  return chain;
}

TuneResult tune_proposal_scale(const TargetDensity& target, ProposalSpec initial,
                               double target_rate, std::uint64_t seed,
                               const TuneOptions& options) {
  check_scale(initial.scale);
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw ConfigError("target acceptance rate must lie in (0, 1)");
  }
  Rng rng(seed);
  MetropolisKernel kernel(target, initial_state(target, initial.scale), rng);
  return detail::adapt_scale(initial.scale, target_rate, options.steps, options,
                             [&](double scale) { return kernel.step(scale); });
}

}  // namespace psv
