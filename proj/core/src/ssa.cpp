#include "paththerm/ssa.hpp"

#include <algorithm>
#include <cmath>

#include "paththerm/error.hpp"

namespace paththerm {

SsaMode parse_ssa_mode(const std::string& text) {
  if (text == "direct") return SsaMode::direct;
  if (text == "two_stage") return SsaMode::two_stage;
  throw InputError("unknown simulation mode '" + text + "' (expected direct or two_stage)");
}

std::string to_string(SsaMode mode) { return mode == SsaMode::direct ? "direct" : "two_stage"; }

Simulator::Simulator(NetworkPtr network, SsaMode mode)
    : network_(std::move(network)), grouping_(*network_), mode_(mode) {
  propensity_.resize(network_->reaction_count());
  group_rate_.resize(grouping_.groups().size());
}

std::size_t Simulator::pick_direct(double total, RngStream& rng) const {
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t r = 0; r < propensity_.size(); ++r) {
    if (propensity_[r] <= 0.0) continue;
    acc += propensity_[r];
    last = r;
    if (target < acc) return r;
  }
  return last;
}

std::size_t Simulator::pick_two_stage(const std::int64_t* x, double total, RngStream& rng) {
  const auto& groups = grouping_.groups();
  double target = rng.uniform() * total;
  std::size_t chosen = groups.size();
  double acc = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    group_rate_[g] = group_rate(*network_, groups[g], x);
    if (group_rate_[g] <= 0.0) continue;
    acc += group_rate_[g];
    chosen = g;
    if (target < acc) break;
  }
  const auto& members = groups[chosen].members;
  target = rng.uniform() * group_rate_[chosen];
  acc = 0.0;
  std::size_t last = members.front();
  for (const auto r : members) {
    if (propensity_[r] <= 0.0) continue;
    acc += propensity_[r];
    last = r;
    if (target < acc) return r;
  }
  return last;
}

Simulator::Step Simulator::step(std::int64_t* x, double remaining, RngStream& rng, double& dwell,
                                std::size_t& channel) {
  double total = 0.0;
  for (std::size_t r = 0; r < propensity_.size(); ++r) {
    propensity_[r] = network_->propensity_unchecked(x, r);
    total += propensity_[r];
  }
  if (!(total > 0.0)) return Step::absorbed;
  dwell = rng.exponential(total);
  if (dwell > remaining) return Step::horizon;
  channel = mode_ == SsaMode::direct ? pick_direct(total, rng) : pick_two_stage(x, total, rng);
  const auto& jump = network_->jump(channel);
  for (std::size_t i = 0; i < jump.size(); ++i) {
    x[i] += jump[i];
    if (x[i] < 0) throw NumericalError("simulation produced a negative copy number");
  }
  return Step::jumped;
}

Trajectory simulate(NetworkPtr network, const State& x0, double t_final, RngStream& rng, SsaMode mode,
                    std::size_t max_events) {
  if (!network) throw InputError("simulate needs a network");
  if (x0.size() != network->dimension()) throw InputError("initial state has the wrong dimension");
  for (const auto v : x0) {
    if (v < 0) throw InputError("initial state has a negative copy number");
  }
  if (!(t_final > 0.0)) throw InputError("t_final must be positive");
  Simulator simulator(network, mode);
  State x = x0;
  std::vector<double> dwells;
  std::vector<std::size_t> channels;
  double t = 0.0;
  bool absorbed = false;
  while (channels.size() < max_events) {
    double dwell = 0.0;
    std::size_t channel = 0;
    const auto result = simulator.step(x.data(), t_final - t, rng, dwell, channel);
    if (result != Simulator::Step::jumped) {
      absorbed = result == Simulator::Step::absorbed;
      break;
    }
    dwells.push_back(dwell);
    channels.push_back(channel);
    t += dwell;
  }
  if (channels.size() == max_events || !std::isfinite(t_final)) t_final = t;
  dwells.push_back(std::max(t_final - t, 0.0));
  return Trajectory(std::move(network), x0, std::move(dwells), std::move(channels), t_final, absorbed);
}

std::size_t advance(Simulator& simulator, State& x, double duration, RngStream& rng, bool* absorbed) {
  double t = 0.0;
  std::size_t events = 0;
  if (absorbed) *absorbed = false;
  for (;;) {
    double dwell = 0.0;
    std::size_t channel = 0;
    const auto result = simulator.step(x.data(), duration - t, rng, dwell, channel);
    if (result == Simulator::Step::absorbed) {
      if (absorbed) *absorbed = true;
      return events;
    }
    if (result == Simulator::Step::horizon) return events;
    t += dwell;
    ++events;
  }
}

}  // namespace paththerm
