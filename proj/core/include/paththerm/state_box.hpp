#ifndef PATHTHERM_STATE_BOX_HPP
#define PATHTHERM_STATE_BOX_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "paththerm/network.hpp"

namespace paththerm {

/// Finite truncation of the state space: the integer box lower <= X <= upper,
/// optionally restricted to the states reachable from an anchor state.
/// Dense indices follow lexicographic order of the states (first component
/// most significant) and are bijective.
class StateBox {
 public:
  StateBox(State lower, State upper);

  /// Box [0, upper].
  explicit StateBox(const State& upper) : StateBox(State(upper.size(), 0), upper) {}

  /// States of [lower, upper] reachable from `anchor` through reactions with
  /// positive propensity. Needed for networks with conservation laws, whose
  /// rectangular box is never irreducible. Throws InputError when more than
  /// `max_states` states are reachable.
  static StateBox reachable(const ReactionNetwork& network, State lower, State upper, const State& anchor,
                            std::size_t max_states = 2'000'000);

  std::size_t dimension() const noexcept { return lower_.size(); }
  std::size_t size() const noexcept { return size_; }
  const State& lower() const noexcept { return lower_; }
  const State& upper() const noexcept { return upper_; }
  bool restricted() const noexcept { return subset_.has_value(); }

  State state(std::size_t index) const;
  void state_into(std::size_t index, std::int64_t* out) const;
  std::optional<std::size_t> index_of(std::span<const std::int64_t> state) const;
  bool contains(std::span<const std::int64_t> state) const { return index_of(state).has_value(); }

 private:
  State lower_;
  State upper_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  std::optional<std::vector<State>> subset_;  // sorted lexicographically
};

using StateBoxPtr = std::shared_ptr<const StateBox>;

/// Box [0, upper] restricted to the states reachable from `anchor`; stays a
/// plain rectangular box when every state is reachable.
StateBoxPtr make_box(const ReactionNetwork& network, const State& upper, const State& anchor,
                     std::size_t max_states = 2'000'000);

/// Probability vector over a StateBox. Entries are nonnegative and sum to one
/// within 1e-12.
class Distribution {
 public:
  Distribution(StateBoxPtr box, std::vector<double> probabilities);

  /// Rescales a nonnegative vector to unit mass before validating.
  static Distribution normalized(StateBoxPtr box, std::vector<double> weights);
  static Distribution delta(StateBoxPtr box, std::span<const std::int64_t> state);
  static Distribution uniform(StateBoxPtr box);

  const StateBox& box() const noexcept { return *box_; }
  const StateBoxPtr& box_ptr() const noexcept { return box_; }
  std::size_t size() const noexcept { return p_.size(); }
  std::span<const double> probabilities() const noexcept { return p_; }
  double operator[](std::size_t index) const { return p_[index]; }

  /// Probability of a state; zero outside the box.
  double at(std::span<const std::int64_t> state) const;

 private:
  StateBoxPtr box_;
  std::vector<double> p_;
};

/// Total variation distance (half the L1 distance). Both distributions must
/// live on the same box.
double total_variation(const Distribution& a, const Distribution& b);

/// CSV with header `x1,...,xN,probability`, states in box enumeration order.
void write_distribution_csv(std::ostream& out, const Distribution& distribution);

}  // namespace paththerm

#endif  // PATHTHERM_STATE_BOX_HPP
