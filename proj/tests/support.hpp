#ifndef PSV_TESTS_SUPPORT_HPP
#define PSV_TESTS_SUPPORT_HPP

// Test-side oracles. Written from the textbook formulas, without calling
// into the library, so that library and oracle can disagree.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

inline double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

inline double gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return std::pow(rate, shape) * std::pow(x, shape - 1.0) * std::exp(-rate * x) /
         std::tgamma(shape);
}

/// Default mixture: 0.998 Gamma(2.5, 0.05) + 0.002 Normal(185, 2).
inline double mixture_pdf(double x) {
  return 0.998 * gamma_pdf(x, 2.5, 0.05) + 0.002 * normal_pdf(x, 185.0, 2.0);
}

/// Adaptive Gauss-Kronrod over [a, b].
template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-12);
}

/// Integral over consecutive [edges[i], edges[i+1]] pieces.
template <class F>
double integrate_pieces(F f, std::initializer_list<double> edges) {
  const std::vector<double> e(edges);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) sum += integrate(f, e[i], e[i + 1]);
  return sum;
}

/// One-sample Kolmogorov-Smirnov statistic.
template <class Cdf>
double ks(std::span<const double> xs, Cdf cdf) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace oracle

#endif  // PSV_TESTS_SUPPORT_HPP
