#include "paththerm/generator.hpp"

#include <algorithm>

#include "paththerm/error.hpp"

namespace paththerm {

Generator build_generator(NetworkPtr network, const ChannelGrouping& grouping, StateBoxPtr box,
                          const GeneratorOptions& options) {
  if (!network || !box) throw InputError("build_generator needs a network and a box");
  if (box->dimension() != network->dimension()) {
    throw InputError("box dimension " + std::to_string(box->dimension()) + " does not match network dimension " +
                     std::to_string(network->dimension()));
  }
  if (box->size() > options.max_states) {
    throw InputError("state box holds " + std::to_string(box->size()) + " states, above the cap of " +
                     std::to_string(options.max_states));
  }

  Generator gen(network, grouping, box);
  const std::size_t n = box->size();
  const std::size_t dim = box->dimension();
  const std::size_t reactions = network->reaction_count();
  gen.channels_.assign(reactions, {});
  gen.outflow_.assign(n, 0.0);
  gen.truncated_.assign(n, 0.0);

  // Off-diagonal lumped entries: same-jump channels land on the same target,
  // so accumulate per (from, group).
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> group_sum(grouping.groups().size());
  std::vector<std::size_t> group_target(grouping.groups().size());
  State s(dim), t(dim);
  for (std::size_t from = 0; from < n; ++from) {
    box->state_into(from, s.data());
    std::fill(group_sum.begin(), group_sum.end(), 0.0);
    for (std::size_t r = 0; r < reactions; ++r) {
      const double a = network->propensity_unchecked(s.data(), r);
      if (a <= 0.0) continue;
      const auto& jump = network->jump(r);
      if (std::all_of(jump.begin(), jump.end(), [](auto v) { return v == 0; })) continue;
      for (std::size_t i = 0; i < dim; ++i) t[i] = s[i] + jump[i];
      const auto to = box->index_of(t);
      if (!to) {
        gen.truncated_[from] += a;
        continue;
      }
      gen.channels_[r].push_back(ChannelTransition{from, *to, a});
      const std::size_t g = grouping.group_of(r);
      group_sum[g] += a;
      group_target[g] = *to;
    }
    double out = 0.0;
    for (std::size_t g = 0; g < group_sum.size(); ++g) {
      if (group_sum[g] <= 0.0) continue;
      triplets.emplace_back(static_cast<int>(group_target[g]), static_cast<int>(from), group_sum[g]);
      out += group_sum[g];
    }
    triplets.emplace_back(static_cast<int>(from), static_cast<int>(from), -out);
    gen.outflow_[from] = out;
    gen.max_outflow_ = std::max(gen.max_outflow_, out);
  }
  gen.lumped_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  gen.lumped_.setFromTriplets(triplets.begin(), triplets.end());
  gen.lumped_.makeCompressed();
  return gen;
}

double Generator::rate(std::size_t from, std::size_t to) const {
  if (from == to) return 0.0;
  return lumped_.coeff(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
}

}  // namespace paththerm
