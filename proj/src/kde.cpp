#include "psv/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fmt/format.h>
#include <numbers>
#include <numeric>

#include "psv/errors.hpp"

namespace psv {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

std::string_view to_string(EdgeMode mode) {
  switch (mode) {
    case EdgeMode::none: return "none";
    case EdgeMode::reflection: return "reflection";
    case EdgeMode::rescaling: return "rescaling";
  }
  return "none";
}

std::optional<EdgeMode> parse_edge_mode(std::string_view text) {
  if (text == "none") return EdgeMode::none;
  if (text == "reflection") return EdgeMode::reflection;
  if (text == "rescaling") return EdgeMode::rescaling;
  return std::nullopt;
}

double silverman_bandwidth(double sigma_hat, std::size_t n) {
  if (n < 1) throw ConfigError("silverman bandwidth needs n >= 1");
  if (!(sigma_hat >= 0.0) || !std::isfinite(sigma_hat)) {
    throw ConfigError(fmt::format("sample spread must be finite and >= 0, got {}", sigma_hat));
  }
  if (sigma_hat == 0.0) {
    throw DegenerateSampleError("degenerate sample: zero spread, bandwidth undefined");
  }
  return 0.9 * sigma_hat * std::pow(static_cast<double>(n), -0.2);
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

KdeModel::KdeModel(std::vector<double> points, double bandwidth, EdgeMode mode,
                   double boundary, bool truncate)
    : points_(std::move(points)),
      bandwidth_(bandwidth),
      mode_(mode),
      boundary_(boundary),
      truncate_(truncate) {
  if (points_.empty()) throw ConfigError("kde needs at least one point");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError(fmt::format("kde bandwidth must be > 0, got {}", bandwidth));
  }
  if (std::isnan(boundary)) throw ConfigError("kde boundary is NaN");
  std::sort(points_.begin(), points_.end());

  const double base = 1.0 / (static_cast<double>(points_.size()) * bandwidth_);
  weights_.assign(points_.size(), base);
  if (mode_ == EdgeMode::rescaling && std::isfinite(boundary_)) {
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const double mass = std_normal_cdf((points_[j] - boundary_) / bandwidth_);
      weights_[j] = base / mass;
    }
  }
}

double KdeModel::kernel_sum(double x, double center_lo, double center_hi,
                            bool mirrored) const {
  // Indices of points whose (possibly mirrored) kernel center is near x.
  double lo = center_lo;
  double hi = center_hi;
  if (mirrored) {
    lo = 2.0 * boundary_ - center_hi;
    hi = 2.0 * boundary_ - center_lo;
  }
  const auto first = std::lower_bound(points_.begin(), points_.end(), lo);
  const auto last = std::upper_bound(first, points_.end(), hi);
  const double inv_w = 1.0 / bandwidth_;
  double sum = 0.0;
  for (auto it = first; it != last; ++it) {
    const double center = mirrored ? 2.0 * boundary_ - *it : *it;
    const double z = (x - center) * inv_w;
    sum += weights_[static_cast<std::size_t>(it - points_.begin())] * std::exp(-0.5 * z * z);
  }
  return sum * kInvSqrt2Pi;
}

double KdeModel::evaluate(double x) const {
  const bool bounded = std::isfinite(boundary_);
  if (mode_ != EdgeMode::none && bounded && x < boundary_) return 0.0;

  const double reach = truncate_ ? kKernelCutoff * bandwidth_ : std::numeric_limits<double>::infinity();
  const double lo = x - reach;
  const double hi = x + reach;
  double h = kernel_sum(x, lo, hi, false);
  if (mode_ == EdgeMode::reflection && bounded) h += kernel_sum(x, lo, hi, true);
  return h;
}

std::vector<double> KdeModel::evaluate(std::span<const double> xs) const {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k > 0 && xs[order[k - 1]] == xs[i]) {
      out[i] = out[order[k - 1]];
    } else {
      out[i] = evaluate(xs[i]);
    }
  }
  return out;
}

KdeModel fit_kde(std::span<const double> samples, double boundary, const KdeOptions& options) {
  if (samples.size() < 2) {
    throw DegenerateSampleError("kde needs at least two retained samples");
  }
  // Sorted first so the bandwidth does not depend on sample order.
  std::vector<double> points(samples.begin(), samples.end());
  std::sort(points.begin(), points.end());
  const double w = options.bandwidth_override
                       ? *options.bandwidth_override
                       : silverman_bandwidth(sample_stddev(points), points.size());
  return KdeModel(std::move(points), w, options.edge_mode, boundary, options.truncate);
}

KdeModel fit_kde(const Chain& chain, double boundary, const KdeOptions& options) {
  return fit_kde(chain.retained(), boundary, options);
}

}  // namespace psv
