#include "paththerm/windows.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "paththerm/error.hpp"

namespace paththerm {

namespace {

struct ChainOutput {
  std::vector<std::vector<ZSample>> by_kind;
  std::size_t absorbed = 0;
  std::size_t events = 0;
  std::exception_ptr error;
};

void run_chain(const NetworkPtr& network, const ChannelGrouping& grouping, const Distribution& stationary,
               const State& x0, const WindowPlan& plan, const std::vector<ZKind>& kinds, std::size_t chain,
               std::size_t count, ChainOutput& out) {
  RngStream rng(plan.seed, chain);
  Simulator simulator(network, plan.mode);
  State x = x0;
  bool absorbed = false;
  out.events += advance(simulator, x, plan.burn_in, rng, &absorbed);
  out.by_kind.assign(kinds.size(), {});
  for (auto& v : out.by_kind) v.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const double t0 = plan.burn_in + static_cast<double>(w) * plan.window;
    const Trajectory traj = simulate(network, x, plan.window, rng, plan.mode);
    out.events += traj.event_count();
    x = traj.final_state();
    if (traj.absorbed()) {
      ++out.absorbed;
      continue;
    }
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      ZSample z = kinds[k] == ZKind::lumped ? z_lumped(traj, grouping, stationary) : z_channel(traj, stationary);
      z.t_start = t0;
      z.t_end = t0 + plan.window;
      out.by_kind[k].push_back(z);
    }
  }
}

}  // namespace

WindowSamples stationary_windows(NetworkPtr network, const Distribution& stationary, const State& x0,
                                 const WindowPlan& plan, const std::vector<ZKind>& kinds) {
  if (!(plan.window > 0.0)) throw InputError("window length must be positive");
  if (plan.n_windows < 1) throw InputError("need at least one window");
  if (plan.chains < 1) throw InputError("need at least one chain");
  if (!(plan.burn_in >= 0.0)) throw InputError("burn-in must be nonnegative");
  for (const auto k : kinds) {
    if (k == ZKind::conditional) throw InputError("window sampling supports the lumped and channel kinds only");
  }
  const ChannelGrouping grouping(*network);
  const std::size_t chains = std::min(plan.chains, plan.n_windows);
  std::vector<ChainOutput> outputs(chains);
  std::vector<std::size_t> counts(chains, plan.n_windows / chains);
  for (std::size_t c = 0; c < plan.n_windows % chains; ++c) ++counts[c];

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chains; c = next++) {
      try {
        run_chain(network, grouping, stationary, x0, plan, kinds, c, counts[c], outputs[c]);
      } catch (...) {
        outputs[c].error = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(plan.jobs, 1, chains);
  std::vector<std::thread> threads;
  for (std::size_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  WindowSamples result;
  result.by_kind.assign(kinds.size(), {});
  for (auto& out : outputs) {
    if (out.error) std::rethrow_exception(out.error);
    result.absorbed_windows += out.absorbed;
    result.events += out.events;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      result.by_kind[k].insert(result.by_kind[k].end(), out.by_kind[k].begin(), out.by_kind[k].end());
    }
  }
  return result;
}

}  // namespace paththerm
