#include "psv/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <vector>

#include "psv/errors.hpp"

namespace psv {
namespace {

void check_inputs(std::span<const double> h, std::span<const double> g) {
  if (h.size() != g.size()) {
    throw ConsistencyError("surrogate and integrand value counts differ");
  }
  if (h.empty()) throw ConsistencyError("no retained samples to estimate from");
  for (double v : g) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConsistencyError("retained sample with g'(x) = 0: chain left the failure domain");
    }
  }
}

LambdaEstimate make_estimate(double lambda, EstimatorKind kind, std::size_t n) {
  return {.lambda = lambda, .probability = 1.0 / lambda, .method = kind, .n_used = n};
}

std::vector<double> gprime_at(std::span<const double> xs, const TargetDensity& target) {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), [&](double x) { return target.gprime(x); });
  return out;
}

std::vector<double> apply(const Surrogate& h, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), h);
  return out;
}

}  // namespace

LambdaEstimate direct_lambda(std::span<const double> h, std::span<const double> g) {
  check_inputs(h, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) sum += h[i] / g[i];
  return make_estimate(sum / static_cast<double>(h.size()), EstimatorKind::direct, h.size());
}

LambdaEstimate variational_lambda(std::span<const double> h, std::span<const double> g) {
  check_inputs(h, g);
  // Power-of-two rescaling keeps g'^2 in range without rounding.
  const int shift = std::ilogb(*std::max_element(g.begin(), g.end()));
  double hg = 0.0;
  double gg = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double gs = std::ldexp(g[i], -shift);
    hg += h[i] * gs;
    gg += gs * gs;
  }
  return make_estimate(std::ldexp(hg / gg, -shift), EstimatorKind::variational, h.size());
}

LambdaEstimate estimate_direct(std::span<const double> samples, const Surrogate& h,
                               const TargetDensity& target) {
  return direct_lambda(apply(h, samples), gprime_at(samples, target));
}

LambdaEstimate estimate_variational(std::span<const double> samples, const Surrogate& h,
                                    const TargetDensity& target) {
  return variational_lambda(apply(h, samples), gprime_at(samples, target));
}

LambdaEstimate estimate_direct(const Chain& chain, const KdeModel& h,
                               const TargetDensity& target) {
  const auto xs = chain.retained();
  return direct_lambda(h.evaluate(xs), gprime_at(xs, target));
}

LambdaEstimate estimate_variational(const Chain& chain, const KdeModel& h,
                                    const TargetDensity& target) {
  const auto xs = chain.retained();
  return variational_lambda(h.evaluate(xs), gprime_at(xs, target));
}

double fraction_in_domain(std::span<const double> samples, const CriteriaFunction& criteria) {
  double sum = 0.0;
  for (double x : samples) sum += criteria(x);
  return sum / static_cast<double>(samples.size());
}

double importance_weighted_mean(std::span<const double> samples, const Density& weighting,
                                const TargetDensity& target) {
  const auto& criteria = target.criteria();
  const auto& base = target.base();
  double sum = 0.0;
  for (double x : samples) {
    if (!criteria.contains(x)) continue;
    sum += criteria(x) * std::exp(base.log_pdf(x) - weighting.log_pdf(x));
  }
  return sum / static_cast<double>(samples.size());
}

double estimate_mcs(const TargetDensity& target, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("mcs needs n >= 1");
  Rng rng(seed);
  std::vector<double> xs(n);
  for (double& x : xs) x = target.base().sample(rng);
  return fraction_in_domain(xs, target.criteria());
}

std::size_t burn_in_count(std::size_t n, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ConfigError(fmt::format("burn-in fraction must lie in [0, 1), got {}", fraction));
  }
  const auto b = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  return n == 0 ? 0 : std::min(b, n - 1);
}

ChainEstimate estimate_mcmc(const TargetDensity& target, std::size_t n, std::uint64_t seed,
                            const BaselineOptions& options) {
  const TargetDensity untruncated(target.base_ptr(), CriteriaFunction(kNegInf));
  const ProposalSpec proposal{options.proposal_scale.value_or(target.base().scale())};
  const Chain chain =
      run_chain(untruncated, proposal, n, burn_in_count(n, options.burn_in_fraction), seed);
  return {fraction_in_domain(chain.retained(), target.criteria()), chain.acceptance_rate()};
}

ChainEstimate estimate_is_mcmc(const TargetDensity& target, std::size_t n, std::uint64_t seed,
                               const IsOptions& options) {
  const double sigma = options.sigma.value_or(target.base().scale());
  auto weighting = std::make_shared<NormalDensity>(target.threshold(), sigma);
  if (options.direct_sampling) {
    if (n == 0) throw ConfigError("is-mcmc needs n >= 1");
    Rng rng(seed);
    std::vector<double> xs(n);
    for (double& x : xs) x = weighting->sample(rng);
    return {importance_weighted_mean(xs, *weighting, target), 1.0};
  }
  const TargetDensity sampled(weighting, CriteriaFunction(kNegInf));
  const ProposalSpec proposal{options.chain.proposal_scale.value_or(sigma)};
  const Chain chain =
      run_chain(sampled, proposal, n, burn_in_count(n, options.chain.burn_in_fraction), seed);
  return {importance_weighted_mean(chain.retained(), *weighting, target),
          chain.acceptance_rate()};
}

std::string_view to_string(SamplerKind kind) {
  return kind == SamplerKind::mcmc ? "mcmc" : "hmc";
}

std::optional<SamplerKind> parse_sampler_kind(std::string_view text) {
  if (text == "mcmc") return SamplerKind::mcmc;
  if (text == "hmc") return SamplerKind::hmc;
  return std::nullopt;
}

Chain draw_chain(const TargetDensity& target, const PsvConfig& config, std::uint64_t seed) {
  const std::size_t burn_in = burn_in_count(config.n, config.burn_in_fraction);
  if (config.sampler == SamplerKind::mcmc) {
    return run_chain(target, config.proposal, config.n, burn_in, seed, config.chain);
  }
  return run_hmc_chain(target, config.hmc, config.n, burn_in, seed, config.hmc_chain);
}

PsvResult run_psv(const TargetDensity& target, const PsvConfig& config, std::uint64_t seed) {
  const Chain chain = draw_chain(target, config, seed);
  const KdeModel h = fit_kde(chain, target.threshold(), config.kde);

  const auto xs = chain.retained();
  const std::vector<double> h_values = h.evaluate(xs);
  const std::vector<double> g = gprime_at(xs, target);

  PsvResult out;
  out.direct = direct_lambda(h_values, g);
  out.variational = variational_lambda(h_values, g);
  out.acceptance_rate = chain.acceptance_rate();
  out.bandwidth = h.bandwidth();
  out.tune_warning = chain.tune_warning;
  return out;
}

}  // namespace psv
