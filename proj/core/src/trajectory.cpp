#include "paththerm/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <string>

#include "paththerm/error.hpp"

namespace paththerm {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void append_state(std::string& out, const std::int64_t* s, std::size_t n) {
  out += '[';
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ',';
    append_int(out, s[i]);
  }
  out += ']';
}

}  // namespace

Trajectory::Trajectory(NetworkPtr network, State initial_state, std::vector<double> dwells,
                       std::vector<std::size_t> channels, double t_final, bool absorbed)
    : network_(std::move(network)),
      initial_(std::move(initial_state)),
      dwells_(std::move(dwells)),
      t_final_(t_final),
      absorbed_(absorbed) {
  if (!network_) throw InputError("trajectory needs a network");
  if (initial_.size() != network_->dimension()) throw InputError("initial state has the wrong dimension");
  if (dwells_.size() != channels.size() + 1) throw InputError("trajectory needs one dwell per event plus a tail");
  const std::size_t dim = initial_.size();
  for (const auto v : initial_) {
    if (v < 0) throw InputError("initial state has a negative copy number");
  }
  states_.resize((channels.size() + 1) * dim);
  std::copy(initial_.begin(), initial_.end(), states_.begin());
  events_.reserve(channels.size());
  double t = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const std::size_t r = channels[k];
    if (r >= network_->reaction_count()) throw InputError("trajectory event has an invalid channel");
    t += dwells_[k];
    events_.push_back(JumpEvent{std::min(t, t_final_), r});
    const auto& jump = network_->jump(r);
    const std::int64_t* prev = states_.data() + k * dim;
    std::int64_t* next = states_.data() + (k + 1) * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      next[i] = prev[i] + jump[i];
      if (next[i] < 0) throw NumericalError("trajectory replay produced a negative copy number");
    }
  }
}

State Trajectory::state_after(std::size_t k) const {
  if (k > events_.size()) throw InputError("event index out of range");
  const auto* p = state_after_ptr(k);
  return State(p, p + initial_.size());
}

State Trajectory::state_at(double t) const {
  if (!(t >= 0.0 && t <= t_final_)) throw InputError("time outside [0, t_final]");
  const auto it = std::upper_bound(events_.begin(), events_.end(), t,
                                   [](double value, const JumpEvent& e) { return value < e.time; });
  return state_after(static_cast<std::size_t>(it - events_.begin()));
}

Trajectory reverse(const Trajectory& trajectory) {
  const auto& network = trajectory.network();
  if (!network.has_reverse_pairing()) throw InputError("reversal needs a reverse-channel pairing");
  if (trajectory.absorbed()) throw InputError("cannot reverse an absorbed trajectory");
  const auto dwells = trajectory.dwells();
  std::vector<double> reversed_dwells(dwells.rbegin(), dwells.rend());
  const auto& events = trajectory.events();
  std::vector<std::size_t> channels;
  channels.reserve(events.size());
  for (auto it = events.rbegin(); it != events.rend(); ++it) channels.push_back(network.reverse_channel(it->channel));
  return Trajectory(trajectory.network_ptr(), trajectory.final_state(), std::move(reversed_dwells),
                    std::move(channels), trajectory.t_final());
}

DiscretizedPath discretize(const Trajectory& trajectory, std::size_t n) {
  if (n < 1) throw InputError("discretization needs n >= 1");
  DiscretizedPath path;
  path.times.reserve(n + 1);
  path.states.reserve(n + 1);
  const double tf = trajectory.t_final();
  const auto& events = trajectory.events();
  std::size_t k = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i == n ? tf : tf * static_cast<double>(i) / static_cast<double>(n);
    while (k < events.size() && events[k].time <= t) ++k;
    path.times.push_back(t);
    path.states.push_back(trajectory.state_after(k));
  }
  return path;
}

std::vector<double> occupation_times(const Trajectory& trajectory, const StateBox& box, double from_time,
                                     double* outside) {
  std::vector<double> time(box.size(), 0.0);
  double out = 0.0;
  const auto& events = trajectory.events();
  const std::size_t dim = box.dimension();
  double start = 0.0;
  for (std::size_t k = 0; k <= events.size(); ++k) {
    const double end = k < events.size() ? events[k].time : trajectory.t_final();
    const double lo = std::max(start, from_time);
    if (end > lo) {
      const auto* s = trajectory.state_after_ptr(k);
      const auto index = box.index_of(std::span<const std::int64_t>(s, dim));
      if (index) {
        time[*index] += end - lo;
      } else {
        out += end - lo;
      }
    }
    start = end;
  }
  if (outside) *outside = out;
  return time;
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory, std::uint64_t seed,
                            std::uint64_t stream) {
  const std::size_t dim = trajectory.initial_state().size();
  std::string line = "{\"x0\":";
  append_state(line, trajectory.initial_state().data(), dim);
  line += ",\"t_final\":";
  append_double(line, trajectory.t_final());
  line += ",\"seed\":";
  line += std::to_string(seed);
  line += ",\"stream\":";
  line += std::to_string(stream);
  if (trajectory.absorbed()) line += ",\"absorbed\":true";
  line += "}\n";
  out << line;
  const auto& events = trajectory.events();
  for (std::size_t k = 0; k < events.size(); ++k) {
    line = "{\"t\":";
    append_double(line, events[k].time);
    line += ",\"rho\":";
    append_int(line, static_cast<std::int64_t>(events[k].channel));
    line += ",\"state\":";
    append_state(line, trajectory.state_after_ptr(k + 1), dim);
    line += "}\n";
    out << line;
  }
}

}  // namespace paththerm
