#ifndef PSV_KDE_HPP
#define PSV_KDE_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psv/chain.hpp"

namespace psv {

/// Boundary treatment for a density supported on [boundary, inf).
enum class EdgeMode {
  none,        ///< plain estimator; mass leaks below the boundary
  reflection,  ///< adds kernels mirrored about the boundary
  rescaling,   ///< renormalizes each kernel to unit mass above the boundary
};

std::string_view to_string(EdgeMode mode);
std::optional<EdgeMode> parse_edge_mode(std::string_view text);

/// Kernels are skipped beyond this many bandwidths when truncation is on.
inline constexpr double kKernelCutoff = 8.0;

/// w = 0.9 * sigma_hat * n^(-1/5). Throws DegenerateSampleError if
/// sigma_hat == 0.
double silverman_bandwidth(double sigma_hat, std::size_t n);

/// Gaussian-kernel density estimate with a fixed scalar bandwidth.
/// Immutable after construction.
class KdeModel {
 public:
  KdeModel(std::vector<double> points, double bandwidth, EdgeMode mode, double boundary,
           bool truncate = true);

  double operator()(double x) const { return evaluate(x); }
  double evaluate(double x) const;
  /// Evaluates at many points; repeated query values are computed once.
  std::vector<double> evaluate(std::span<const double> xs) const;

  double bandwidth() const { return bandwidth_; }
  EdgeMode edge_mode() const { return mode_; }
  double boundary() const { return boundary_; }
  bool truncated() const { return truncate_; }
  /// Points in ascending order.
  std::span<const double> points() const { return points_; }

 private:
  double kernel_sum(double x, double center_lo, double center_hi, bool mirrored) const;

  std::vector<double> points_;
  /// Per-kernel normalization; 1/(N w) scaled by 1/mass-above-boundary
  /// in rescaling mode.
  std::vector<double> weights_;
  double bandwidth_;
  EdgeMode mode_;
  double boundary_;
  bool truncate_;
};

struct KdeOptions {
  EdgeMode edge_mode = EdgeMode::reflection;
  std::optional<double> bandwidth_override;
  bool truncate = true;
};

/// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> xs);

/// Fits a KDE to the post-burn-in samples with the Silverman bandwidth
/// unless an override is given.
KdeModel fit_kde(const Chain& chain, double boundary, const KdeOptions& options = {});
KdeModel fit_kde(std::span<const double> samples, double boundary,
                 const KdeOptions& options = {});

}  // namespace psv

#endif  // PSV_KDE_HPP
