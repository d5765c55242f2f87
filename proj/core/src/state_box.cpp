#include "paththerm/state_box.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

#include "paththerm/error.hpp"

namespace paththerm {

StateBox::StateBox(State lower, State upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.empty()) {
    throw InputError("state box bounds must be nonempty and of equal dimension");
  }
  strides_.assign(lower_.size(), 1);
  std::size_t total = 1;
  for (std::size_t i = lower_.size(); i-- > 0;) {
    if (lower_[i] < 0) throw InputError("state box lower bound must be nonnegative");
    if (lower_[i] > upper_[i]) throw InputError("state box lower bound exceeds upper bound");
    const auto extent = static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
    strides_[i] = total;
    if (total > std::numeric_limits<std::size_t>::max() / extent) {
      throw InputError("state box is too large to index");
    }
    total *= extent;
  }
  size_ = total;
}

StateBox StateBox::reachable(const ReactionNetwork& network, State lower, State upper, const State& anchor,
                             std::size_t max_states) {
  StateBox box(std::move(lower), std::move(upper));
  if (anchor.size() != box.dimension()) throw InputError("anchor state has the wrong dimension");
  if (!box.contains(anchor)) throw InputError("anchor state lies outside the box");
  std::set<State> seen{anchor};
  std::deque<State> frontier{anchor};
  State next(anchor.size());
  while (!frontier.empty()) {
    const State current = std::move(frontier.front());
    frontier.pop_front();
    for (std::size_t r = 0; r < network.reaction_count(); ++r) {
      if (network.propensity_unchecked(current.data(), r) <= 0.0) continue;
      const auto& jump = network.jump(r);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = current[i] + jump[i];
      if (!box.contains(next) || seen.count(next)) continue;
      seen.insert(next);
      if (seen.size() > max_states) {
        throw InputError("more than " + std::to_string(max_states) + " reachable states in the box");
      }
      frontier.push_back(next);
    }
  }
  box.subset_ = std::vector<State>(seen.begin(), seen.end());  // std::set<State> is lexicographic
  box.size_ = box.subset_->size();
  return box;
}

StateBoxPtr make_box(const ReactionNetwork& network, const State& upper, const State& anchor,
                     std::size_t max_states) {
  const State lower(upper.size(), 0);
  StateBox full(lower, upper);
  StateBox reach = StateBox::reachable(network, lower, upper, anchor, max_states);
  if (reach.size() == full.size()) return std::make_shared<const StateBox>(std::move(full));
  return std::make_shared<const StateBox>(std::move(reach));
}

State StateBox::state(std::size_t index) const {
  State s(dimension());
  state_into(index, s.data());
  return s;
}

void StateBox::state_into(std::size_t index, std::int64_t* out) const {
  if (index >= size_) throw InputError("state index out of range");
  if (subset_) {
    const auto& s = (*subset_)[index];
    std::copy(s.begin(), s.end(), out);
    return;
  }
  for (std::size_t i = 0; i < dimension(); ++i) {
    out[i] = lower_[i] + static_cast<std::int64_t>(index / strides_[i]);
    index %= strides_[i];
  }
}

std::optional<std::size_t> StateBox::index_of(std::span<const std::int64_t> state) const {
  if (state.size() != dimension()) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (state[i] < lower_[i] || state[i] > upper_[i]) return std::nullopt;
    index += static_cast<std::size_t>(state[i] - lower_[i]) * strides_[i];
  }
  if (!subset_) return index;
  const auto it = std::lower_bound(subset_->begin(), subset_->end(), state,
                                   [](const State& a, std::span<const std::int64_t> b) {
                                     return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                                   });
  if (it == subset_->end() || !std::equal(it->begin(), it->end(), state.begin(), state.end())) return std::nullopt;
  return static_cast<std::size_t>(it - subset_->begin());
}

Distribution::Distribution(StateBoxPtr box, std::vector<double> probabilities)
    : box_(std::move(box)), p_(std::move(probabilities)) {
  if (!box_) throw InputError("distribution needs a state box");
  if (p_.size() != box_->size()) throw InputError("distribution size does not match its state box");
  double sum = 0.0;
  for (const double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericalError("distribution has a negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw NumericalError("distribution does not sum to one");
}

Distribution Distribution::normalized(StateBoxPtr box, std::vector<double> weights) {
  double sum = 0.0;
  for (const double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericalError("cannot normalize a negative or non-finite weight");
    sum += v;
  }
  if (!(sum > 0.0)) throw NumericalError("cannot normalize a zero weight vector");
  for (double& v : weights) v /= sum;
  return Distribution(std::move(box), std::move(weights));
}

Distribution Distribution::delta(StateBoxPtr box, std::span<const std::int64_t> state) {
  const auto index = box->index_of(state);
  if (!index) throw InputError("delta distribution at a state outside the box");
  std::vector<double> p(box->size(), 0.0);
  p[*index] = 1.0;
  return Distribution(std::move(box), std::move(p));
}

Distribution Distribution::uniform(StateBoxPtr box) {
  std::vector<double> p(box->size(), 1.0);
  return normalized(std::move(box), std::move(p));
}

double Distribution::at(std::span<const std::int64_t> state) const {
  const auto index = box_->index_of(state);
  return index ? p_[*index] : 0.0;
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) throw InputError("total variation between distributions on different boxes");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

void write_distribution_csv(std::ostream& out, const Distribution& distribution) {
  const auto& box = distribution.box();
  for (std::size_t i = 0; i < box.dimension(); ++i) out << 'x' << (i + 1) << ',';
  out << "probability\n";
  const auto old_precision = out.precision(17);
  State s(box.dimension());
  for (std::size_t k = 0; k < box.size(); ++k) {
    box.state_into(k, s.data());
    for (const auto v : s) out << v << ',';
    out << distribution[k] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace paththerm
