#ifndef PATHTHERM_WINDOWS_HPP
#define PATHTHERM_WINDOWS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "paththerm/path_entropy.hpp"
#include "paththerm/ssa.hpp"

namespace paththerm {

/// Stationary window sampling. Each chain is one long SSA run on its own
/// stream (seed, chain index): a burn-in span, then consecutive windows of
/// length `window`. Results are ordered by chain, then window, and do not
/// depend on `jobs`.
struct WindowPlan {
  double window = 1.0;
  std::size_t n_windows = 1;
  double burn_in = 0.0;
  std::size_t chains = 8;
  std::size_t jobs = 1;
  SsaMode mode = SsaMode::direct;
  std::uint64_t seed = 0;
};

struct WindowSamples {
  /// One vector per requested kind, in request order.
  std::vector<std::vector<ZSample>> by_kind;
  std::size_t absorbed_windows = 0;
  std::size_t events = 0;
};

/// Z over stationary windows with stationary endpoint weighting. Supports the
/// lumped and channel kinds. Absorbed windows are counted and skipped.
WindowSamples stationary_windows(NetworkPtr network, const Distribution& stationary, const State& x0,
                                 const WindowPlan& plan, const std::vector<ZKind>& kinds);

}  // namespace paththerm

#endif  // PATHTHERM_WINDOWS_HPP
