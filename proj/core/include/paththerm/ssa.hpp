#ifndef PATHTHERM_SSA_HPP
#define PATHTHERM_SSA_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "paththerm/network.hpp"
#include "paththerm/rng.hpp"
#include "paththerm/trajectory.hpp"

namespace paththerm {

enum class SsaMode {
  direct,     ///< channel drawn with probability a_rho / a_tot
  two_stage,  ///< jump vector first, then the channel inside its group
};

SsaMode parse_ssa_mode(const std::string& text);
std::string to_string(SsaMode mode);

/// Gillespie stepper. Holds scratch buffers, so one instance per thread.
class Simulator {
 public:
  enum class Step { jumped, horizon, absorbed };

  Simulator(NetworkPtr network, SsaMode mode);

  const ReactionNetwork& network() const noexcept { return *network_; }
  SsaMode mode() const noexcept { return mode_; }

  /// Draws the next event at state x. If it happens within `remaining`, applies
  /// it to x, sets `dwell` and `channel` and returns jumped. Otherwise leaves x
  /// alone and returns horizon (or absorbed when a_tot = 0).
  Step step(std::int64_t* x, double remaining, RngStream& rng, double& dwell, std::size_t& channel);

 private:
  std::size_t pick_direct(double total, RngStream& rng) const;
  std::size_t pick_two_stage(const std::int64_t* x, double total, RngStream& rng);

  NetworkPtr network_;
  ChannelGrouping grouping_;
  SsaMode mode_;
  std::vector<double> propensity_;
  std::vector<double> group_rate_;
};

/// Exact trajectory on [0, t_final]. Throws InputError for a negative x0 or
/// t_final <= 0. With `max_events`, the run stops at that many jumps and the
/// trajectory ends at the last jump; an infinite t_final is then allowed.
Trajectory simulate(NetworkPtr network, const State& x0, double t_final, RngStream& rng,
                    SsaMode mode = SsaMode::direct,
                    std::size_t max_events = std::numeric_limits<std::size_t>::max());

/// Advances `x` over a span of `duration` without recording. Returns the
/// number of events; sets `absorbed` when a_tot hit zero.
std::size_t advance(Simulator& simulator, State& x, double duration, RngStream& rng, bool* absorbed = nullptr);

}  // namespace paththerm

#endif  // PATHTHERM_SSA_HPP
