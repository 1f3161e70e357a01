#ifndef PSV_CHAIN_HPP
#define PSV_CHAIN_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace psv {

/// Ordered sample sequence from a Markov chain. One entry per proposal;
/// rejected proposals repeat the previous state.
struct Chain {
  std::vector<double> samples;
  std::vector<std::uint8_t> accepted;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  /// Kernel scale in effect after burn-in (proposal sd or leapfrog step).
  double kernel_scale = 0.0;
  /// Set when burn-in adaptation did not reach the target acceptance band.
  bool tune_warning = false;

  std::size_t proposals_made() const { return samples.size(); }
  std::size_t accepts() const;
  std::size_t retained_size() const { return samples.size() - burn_in; }

  std::span<const double> retained() const {
    return std::span<const double>(samples).subspan(burn_in);
  }

  /// Acceptance rate over the post-burn-in steps.
  double acceptance_rate() const;
};

}  // namespace psv

#endif  // PSV_CHAIN_HPP
