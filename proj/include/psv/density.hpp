#ifndef PSV_DENSITY_HPP
#define PSV_DENSITY_HPP

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "psv/rng.hpp"

namespace psv {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Indicator of the failure domain: C(x) = 1 iff x >= threshold.
class CriteriaFunction {
 public:
  explicit CriteriaFunction(double threshold);

  double threshold() const { return threshold_; }
  bool contains(double x) const { return x >= threshold_; }
  double operator()(double x) const { return contains(x) ? 1.0 : 0.0; }

 private:
  double threshold_;
};

/// Base density f(x). Log-density is -inf outside its support; the gradient
/// is only meaningful where the log-density is finite.
class Density {
 public:
  virtual ~Density() = default;

  virtual double log_pdf(double x) const = 0;
  virtual double grad_log_pdf(double x) const = 0;
  /// P{X >= x}, when a closed form is available.
  virtual std::optional<double> upper_tail(double x) const = 0;
  virtual double sample(Rng& rng) const = 0;

  /// Central point used to start chains on the untruncated density.
  virtual double location() const = 0;
  /// Characteristic spread; default proposal scale and IS weighting width.
  virtual double scale() const = 0;
  virtual std::string describe() const = 0;
};

class NormalDensity final : public Density {
 public:
  NormalDensity(double mean, double stddev);

  double log_pdf(double x) const override;
  double grad_log_pdf(double x) const override;
  std::optional<double> upper_tail(double x) const override;
  double sample(Rng& rng) const override;
  double location() const override { return mean_; }
  double scale() const override { return stddev_; }
  std::string describe() const override;

  double mean() const { return mean_; }
  double stddev() const { return stddev_; }

 private:
  double mean_;
  double stddev_;
  double log_norm_;
};

/// f(x) = f1 * Gamma(shape, rate)(x) + (1 - f1) * Normal(mean, stddev)(x).
class GammaGaussianMixture final : public Density {
 public:
  struct Params {
    double rate = 0.05;
    double shape = 2.5;
    double gamma_weight = 0.998;
    double mean = 185.0;
    double stddev = 2.0;
  };

  explicit GammaGaussianMixture(const Params& params);

  double log_pdf(double x) const override;
  double grad_log_pdf(double x) const override;
  std::optional<double> upper_tail(double x) const override;
  double sample(Rng& rng) const override;
  double location() const override;
  /// Standard deviation of the Gamma component, sqrt(shape) / rate.
  double scale() const override;
  std::string describe() const override;

  const Params& params() const { return params_; }
  double normal_weight() const { return 1.0 - params_.gamma_weight; }

 private:
  double log_gamma_pdf(double x) const;
  double log_normal_pdf(double x) const;

  Params params_;
  double gamma_log_norm_;
  double normal_log_norm_;
};

class UniformDensity final : public Density {
 public:
  UniformDensity(double lower, double upper);

  double log_pdf(double x) const override;
  double grad_log_pdf(double x) const override;
  std::optional<double> upper_tail(double x) const override;
  double sample(Rng& rng) const override;
  double location() const override { return 0.5 * (lower_ + upper_); }
  double scale() const override;
  std::string describe() const override;

  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// Unnormalized integrand g'(x) = C(x) f(x). Immutable; cheap to copy.
class TargetDensity {
 public:
  TargetDensity(std::shared_ptr<const Density> base, CriteriaFunction criteria);

  /// log f(x) for x >= x_T, -inf below.
  double log_gprime(double x) const;
  double gprime(double x) const;
  /// d/dx log f(x) for x >= x_T; NaN below the threshold.
  double grad_log_gprime(double x) const;
  /// Exact P{x >= x_T}, or nullopt when the base density has no closed form.
  std::optional<double> analytic_tail() const;
  bool in_support(double x) const;

  const Density& base() const { return *base_; }
  std::shared_ptr<const Density> base_ptr() const { return base_; }
  const CriteriaFunction& criteria() const { return criteria_; }
  double threshold() const { return criteria_.threshold(); }

 private:
  std::shared_ptr<const Density> base_;
  CriteriaFunction criteria_;
};

TargetDensity make_normal_target(double mean, double stddev, double threshold);
TargetDensity make_mixture_target(const GammaGaussianMixture::Params& params,
                                  double threshold);

}  // namespace psv

#endif  // PSV_DENSITY_HPP
