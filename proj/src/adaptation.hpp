#ifndef PSV_SRC_ADAPTATION_HPP
#define PSV_SRC_ADAPTATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "psv/sampler.hpp"

namespace psv::detail {

/// Runs `steps` kernel transitions, adapting the scale over all but the
/// trailing window. `step(scale)` performs one transition and returns
/// whether it was accepted.
template <class Step>
TuneResult adapt_scale(double scale, double target, std::size_t steps,
                       const TuneOptions& options, Step&& step) {
  const std::size_t window = std::min(options.window, steps / 2);
  const std::size_t adapt_steps = steps - window;
  const std::size_t batch = std::max<std::size_t>(options.batch, 1);

  TuneResult result;
  result.initial_rate = std::numeric_limits<double>::quiet_NaN();
  double best_scale = scale;
  double best_gap = std::numeric_limits<double>::infinity();

  std::size_t batch_index = 0;
  std::size_t in_batch = 0;
  std::size_t batch_accepts = 0;
  for (std::size_t i = 0; i < adapt_steps; ++i) {
    batch_accepts += step(scale) ? 1 : 0;
    ++in_batch;
    if (in_batch == batch || i + 1 == adapt_steps) {
      const double rate = static_cast<double>(batch_accepts) / in_batch;
      ++batch_index;
      if (batch_index == 1) result.initial_rate = rate;
      if (std::abs(rate - target) < best_gap) {
        best_gap = std::abs(rate - target);
        best_scale = scale;
      }
      scale *= std::exp(options.gain / batch_index * (rate - target));
      in_batch = 0;
      batch_accepts = 0;
    }
  }

  std::size_t window_accepts = 0;
  for (std::size_t i = 0; i < window; ++i) window_accepts += step(scale) ? 1 : 0;
  result.window_rate = window > 0 ? static_cast<double>(window_accepts) / window
                                  : std::numeric_limits<double>::quiet_NaN();
  if (std::isnan(result.initial_rate)) result.initial_rate = result.window_rate;

  const double window_gap = std::abs(result.window_rate - target);
  result.warning = !(window_gap <= options.tolerance);
  result.scale = scale;
  if (result.warning && best_gap < window_gap) result.scale = best_scale;
  return result;
}

}  // namespace psv::detail

#endif  // PSV_SRC_ADAPTATION_HPP
