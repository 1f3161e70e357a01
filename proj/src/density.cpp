#include "psv/density.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "psv/errors.hpp"

namespace psv {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

double normal_upper_tail(double x, double mean, double stddev) {
  return 0.5 * std::erfc((x - mean) / (stddev * std::numbers::sqrt2));
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

CriteriaFunction::CriteriaFunction(double threshold) : threshold_(threshold) {
  if (std::isnan(threshold)) throw ConfigError("criteria threshold x_T is NaN");
}

// ---------------------------------------------------------------- Normal

NormalDensity::NormalDensity(double mean, double stddev)
    : mean_(mean), stddev_(stddev) {
  if (!std::isfinite(mean)) throw ConfigError("normal: mean must be finite");
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw ConfigError("normal: sigma must be a positive finite number");
  }
  log_norm_ = -std::log(stddev_) - kHalfLog2Pi;
}

double NormalDensity::log_pdf(double x) const {
  const double z = (x - mean_) / stddev_;
  return log_norm_ - 0.5 * z * z;
}

double NormalDensity::grad_log_pdf(double x) const {
  return -(x - mean_) / (stddev_ * stddev_);
}

std::optional<double> NormalDensity::upper_tail(double x) const {
  return normal_upper_tail(x, mean_, stddev_);
}

double NormalDensity::sample(Rng& rng) const {
  return mean_ + stddev_ * standard_normal(rng);
}

std::string NormalDensity::describe() const {
  return fmt::format("Normal(mu={}, sigma={})", mean_, stddev_);
}

// --------------------------------------------------------------- Mixture

GammaGaussianMixture::GammaGaussianMixture(const Params& params)
    : params_(params) {
  if (!(params.rate > 0.0) || !std::isfinite(params.rate)) {
    throw ConfigError("mixture: alpha (rate) must be positive");
  }
  if (!(params.shape > 0.0) || !std::isfinite(params.shape)) {
    throw ConfigError("mixture: nu (shape) must be positive");
  }
  if (!(params.gamma_weight >= 0.0 && params.gamma_weight <= 1.0)) {
    throw ConfigError("mixture: f1 must lie in [0, 1]");
  }
  if (!std::isfinite(params.mean)) throw ConfigError("mixture: mu must be finite");
  if (!(params.stddev > 0.0) || !std::isfinite(params.stddev)) {
    throw ConfigError("mixture: sigma must be positive");
  }
  gamma_log_norm_ = params.shape * std::log(params.rate) - std::lgamma(params.shape);
  normal_log_norm_ = -std::log(params.stddev) - kHalfLog2Pi;
}

double GammaGaussianMixture::log_gamma_pdf(double x) const {
  if (!(x > 0.0)) return kNegInf;
  return gamma_log_norm_ + (params_.shape - 1.0) * std::log(x) - params_.rate * x;
}

double GammaGaussianMixture::log_normal_pdf(double x) const {
  const double z = (x - params_.mean) / params_.stddev;
  return normal_log_norm_ - 0.5 * z * z;
}

double GammaGaussianMixture::log_pdf(double x) const {
  const double f1 = params_.gamma_weight;
  const double f2 = normal_weight();
  const double a = f1 > 0.0 ? std::log(f1) + log_gamma_pdf(x) : kNegInf;
  const double b = f2 > 0.0 ? std::log(f2) + log_normal_pdf(x) : kNegInf;
  return log_add(a, b);
}

double GammaGaussianMixture::grad_log_pdf(double x) const {
  const double f1 = params_.gamma_weight;
  const double f2 = normal_weight();
  const double a = f1 > 0.0 ? std::log(f1) + log_gamma_pdf(x) : kNegInf;
  const double b = f2 > 0.0 ? std::log(f2) + log_normal_pdf(x) : kNegInf;
  const double total = log_add(a, b);
  // Posterior component responsibilities weight each component's score.
  const double w_gamma = a == kNegInf ? 0.0 : std::exp(a - total);
  const double w_normal = b == kNegInf ? 0.0 : std::exp(b - total);
  double grad = 0.0;
  if (w_gamma > 0.0) grad += w_gamma * ((params_.shape - 1.0) / x - params_.rate);
  if (w_normal > 0.0) {
    grad += w_normal * (-(x - params_.mean) / (params_.stddev * params_.stddev));
  }
  return grad;
}

std::optional<double> GammaGaussianMixture::upper_tail(double x) const {
  const double gamma_tail =
      x <= 0.0 ? 1.0
               : (x == kPosInf ? 0.0
                               : boost::math::gamma_q(params_.shape, params_.rate * x));
  return params_.gamma_weight * gamma_tail +
         normal_weight() * normal_upper_tail(x, params_.mean, params_.stddev);
}

double GammaGaussianMixture::sample(Rng& rng) const {
  if (uniform01(rng) < params_.gamma_weight) {
    return std::gamma_distribution<double>(params_.shape, 1.0 / params_.rate)(rng);
  }
  return params_.mean + params_.stddev * standard_normal(rng);
}

double GammaGaussianMixture::location() const {
  return params_.gamma_weight * params_.shape / params_.rate +
         normal_weight() * params_.mean;
}

double GammaGaussianMixture::scale() const {
  return std::sqrt(params_.shape) / params_.rate;
}

std::string GammaGaussianMixture::describe() const {
  return fmt::format("GammaGaussianMixture(alpha={}, nu={}, f1={}, mu={}, sigma={})",
                     params_.rate, params_.shape, params_.gamma_weight, params_.mean,
                     params_.stddev);
}

// --------------------------------------------------------------- Uniform

UniformDensity::UniformDensity(double lower, double upper)
    : lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower)) {
    throw ConfigError("uniform: need finite lower < upper");
  }
}

double UniformDensity::log_pdf(double x) const {
  if (x < lower_ || x > upper_) return kNegInf;
  return -std::log(upper_ - lower_);
}

double UniformDensity::grad_log_pdf(double) const { return 0.0; }

std::optional<double> UniformDensity::upper_tail(double x) const {
  if (x <= lower_) return 1.0;
  if (x >= upper_) return 0.0;
  return (upper_ - x) / (upper_ - lower_);
}

double UniformDensity::sample(Rng& rng) const {
  return lower_ + (upper_ - lower_) * uniform01(rng);
}

double UniformDensity::scale() const { return (upper_ - lower_) / std::sqrt(12.0); }

std::string UniformDensity::describe() const {
  return fmt::format("Uniform(lower={}, upper={})", lower_, upper_);
}

// ---------------------------------------------------------------- Target

TargetDensity::TargetDensity(std::shared_ptr<const Density> base,
                             CriteriaFunction criteria)
    : base_(std::move(base)), criteria_(criteria) {
  if (!base_) throw ConfigError("target density needs a base density");
}

double TargetDensity::log_gprime(double x) const {
  if (!criteria_.contains(x)) return kNegInf;  // also catches NaN
  return base_->log_pdf(x);
}

double TargetDensity::gprime(double x) const { return std::exp(log_gprime(x)); }

double TargetDensity::grad_log_gprime(double x) const {
  if (!criteria_.contains(x)) return std::numeric_limits<double>::quiet_NaN();
  return base_->grad_log_pdf(x);
}

std::optional<double> TargetDensity::analytic_tail() const {
  return base_->upper_tail(criteria_.threshold());
}

bool TargetDensity::in_support(double x) const {
  return std::isfinite(log_gprime(x));
}

TargetDensity make_normal_target(double mean, double stddev, double threshold) {
  return {std::make_shared<NormalDensity>(mean, stddev), CriteriaFunction(threshold)};
}

TargetDensity make_mixture_target(const GammaGaussianMixture::Params& params,
                                  double threshold) {
  return {std::make_shared<GammaGaussianMixture>(params), CriteriaFunction(threshold)};
}

}  // namespace psv
