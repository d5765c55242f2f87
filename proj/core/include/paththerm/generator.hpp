#ifndef PATHTHERM_GENERATOR_HPP
#define PATHTHERM_GENERATOR_HPP

#include <Eigen/SparseCore>
#include <cstddef>
#include <span>
#include <vector>

#include "paththerm/network.hpp"
#include "paththerm/state_box.hpp"

namespace paththerm {

/// One channel-resolved transition inside the box.
struct ChannelTransition {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

struct GeneratorOptions {
  std::size_t max_states = 2'000'000;
};

/// Truncated master-equation generator.
///
/// `lumped()` is the operator G with G(to, from) = sum of the channel rates
/// from `from` to `to` and G(from, from) = -(total outflow), so every column
/// sums to zero. Transitions that would leave the box are dropped (reflecting
/// truncation); their propensity is recorded per state in
/// `truncated_outflow()` so the boundary mass can be audited.
class Generator {
 public:
  const ReactionNetwork& network() const noexcept { return *network_; }
  const NetworkPtr& network_ptr() const noexcept { return network_; }
  const ChannelGrouping& grouping() const noexcept { return grouping_; }
  const StateBox& box() const noexcept { return *box_; }
  const StateBoxPtr& box_ptr() const noexcept { return box_; }
  std::size_t size() const noexcept { return box_->size(); }

  /// Per reaction id, its transitions sorted by source index.
  const std::vector<std::vector<ChannelTransition>>& channel_rates() const noexcept { return channels_; }

  const Eigen::SparseMatrix<double>& lumped() const noexcept { return lumped_; }

  std::span<const double> outflow() const noexcept { return outflow_; }
  std::span<const double> truncated_outflow() const noexcept { return truncated_; }

  /// Largest total outflow over the box (the uniformization constant).
  double max_outflow() const noexcept { return max_outflow_; }

  /// Lumped rate from state index `from` to state index `to` (0 if none).
  double rate(std::size_t from, std::size_t to) const;

 private:
  friend Generator build_generator(NetworkPtr, const ChannelGrouping&, StateBoxPtr, const GeneratorOptions&);

  Generator(NetworkPtr network, ChannelGrouping grouping, StateBoxPtr box)
      : network_(std::move(network)), grouping_(std::move(grouping)), box_(std::move(box)) {}

  NetworkPtr network_;
  ChannelGrouping grouping_;
  StateBoxPtr box_;
  std::vector<std::vector<ChannelTransition>> channels_;
  Eigen::SparseMatrix<double> lumped_;
  std::vector<double> outflow_;
  std::vector<double> truncated_;
  double max_outflow_ = 0.0;
};

/// Assembles the generator. Throws InputError when the box dimension differs
/// from the network dimension or the box exceeds `options.max_states`.
Generator build_generator(NetworkPtr network, const ChannelGrouping& grouping, StateBoxPtr box,
                          const GeneratorOptions& options = {});

inline Generator build_generator(NetworkPtr network, StateBoxPtr box, const GeneratorOptions& options = {}) {
  const ChannelGrouping grouping(*network);
  return build_generator(std::move(network), grouping, std::move(box), options);
}

}  // namespace paththerm

#endif  // PATHTHERM_GENERATOR_HPP
