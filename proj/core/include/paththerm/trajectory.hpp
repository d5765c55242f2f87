#ifndef PATHTHERM_TRAJECTORY_HPP
#define PATHTHERM_TRAJECTORY_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "paththerm/network.hpp"
#include "paththerm/state_box.hpp"

namespace paththerm {

/// One reaction event. The jump vector is the network's jump of `channel`.
struct JumpEvent {
  double time = 0.0;
  std::size_t channel = 0;
};

/// States of a trajectory read off a time grid t_0 < ... < t_n.
struct DiscretizedPath {
  std::vector<double> times;
  std::vector<State> states;
};

/// Piecewise-constant sample path on [0, t_final].
///
/// Stored as the sequence of dwell times (one per event plus the tail after
/// the last event) and channel labels. Event times are running sums of the
/// dwells, which keeps reverse() an exact involution.
class Trajectory {
 public:
  /// `dwells` must hold one more entry than `channels`. Replays the jumps and
  /// throws NumericalError if a copy number goes negative.
  Trajectory(NetworkPtr network, State initial_state, std::vector<double> dwells,
             std::vector<std::size_t> channels, double t_final, bool absorbed = false);

  const ReactionNetwork& network() const noexcept { return *network_; }
  const NetworkPtr& network_ptr() const noexcept { return network_; }
  const State& initial_state() const noexcept { return initial_; }
  State final_state() const { return state_after(events_.size()); }
  double t_final() const noexcept { return t_final_; }
  bool absorbed() const noexcept { return absorbed_; }

  const std::vector<JumpEvent>& events() const noexcept { return events_; }
  std::size_t event_count() const noexcept { return events_.size(); }
  const JumpVector& jump(std::size_t event) const { return network_->jump(events_.at(event).channel); }
  std::span<const double> dwells() const noexcept { return dwells_; }

  /// State after the first `k` events (k = 0 is the initial state).
  State state_after(std::size_t k) const;
  const std::int64_t* state_after_ptr(std::size_t k) const { return states_.data() + k * initial_.size(); }

  /// Right-continuous state at time t. Throws InputError outside [0, t_final].
  State state_at(double t) const;

 private:
  NetworkPtr network_;
  State initial_;
  std::vector<double> dwells_;
  std::vector<JumpEvent> events_;
  std::vector<std::int64_t> states_;  // (events + 1) x N, row k = state after k events
  double t_final_ = 0.0;
  bool absorbed_ = false;
};

/// Time reversal: starts at the final state, event at t becomes an event at
/// t_final - t carrying the paired reverse channel. Throws InputError without
/// a reverse pairing or for an absorbed trajectory.
Trajectory reverse(const Trajectory& trajectory);

/// Uniform grid t_i = t_final * i / n, i = 0..n. Throws InputError for n < 1.
DiscretizedPath discretize(const Trajectory& trajectory, std::size_t n);

inline State state_at(const Trajectory& trajectory, double t) { return trajectory.state_at(t); }

/// Time spent in each box state after `from_time`. Time outside the box is
/// returned in `outside`.
std::vector<double> occupation_times(const Trajectory& trajectory, const StateBox& box, double from_time,
                                     double* outside = nullptr);

/// JSON Lines: header {"x0", "t_final", "seed", "stream"} then one
/// {"t", "rho", "state"} object per event.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory, std::uint64_t seed,
                            std::uint64_t stream);

}  // namespace paththerm

#endif  // PATHTHERM_TRAJECTORY_HPP
