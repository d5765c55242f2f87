#include "paththerm/network.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "paththerm/error.hpp"

namespace paththerm {

namespace {

// Merges repeated species on one side ("X + X" is "2 X") and drops zero
// coefficients, keeping first-appearance order.
std::vector<Term> canonical_side(const std::vector<Term>& side) {
  std::vector<Term> out;
  for (const auto& term : side) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Term& t) { return t.species == term.species; });
    if (it == out.end()) {
      out.push_back(term);
    } else {
      it->coefficient += term.coefficient;
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coefficient == 0; });
  return out;
}

}  // namespace

double falling_factorial(std::int64_t n, std::int64_t k) noexcept {
  if (n < k) return 0.0;
  double result = 1.0;
  for (std::int64_t i = 0; i < k; ++i) result *= static_cast<double>(n - i);
  return result;
}

ReactionNetwork::ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions,
                                 std::optional<std::vector<std::size_t>> reverse_pairing)
    : species_(std::move(species)), reactions_(std::move(reactions)), reverse_(std::move(reverse_pairing)) {
  std::set<std::string> names;
  dynamic_index_.assign(species_.size(), std::nullopt);
  for (std::size_t s = 0; s < species_.size(); ++s) {
    const auto& sp = species_[s];
    if (sp.name.empty()) throw InputError("species with empty name");
    if (!names.insert(sp.name).second) throw InputError("duplicate species '" + sp.name + "'");
    if (sp.kind == SpeciesKind::dynamic) {
      if (sp.fixed_count != 0) throw InputError("dynamic species '" + sp.name + "' carries a fixed count");
      dynamic_index_[s] = dynamic_.size();
      dynamic_.push_back(s);
    } else if (sp.fixed_count < 0) {
      throw InputError("chemostatted species '" + sp.name + "' has a negative copy number");
    }
  }
  if (dynamic_.empty()) throw InputError("network declares no dynamic species");

  const std::size_t n = dynamic_.size();
  jumps_.reserve(reactions_.size());
  compiled_.reserve(reactions_.size());
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    auto& reaction = reactions_[r];
    reaction.id = r;
    if (!(reaction.rate_constant > 0.0)) {
      throw InputError("reaction " + std::to_string(r) + " has a nonpositive rate constant");
    }
    bool any = false;
    for (const auto& term : reaction.reactants) {
      if (term.coefficient < 0) throw InputError("reaction " + std::to_string(r) + " has a negative coefficient");
    }
    for (const auto& term : reaction.products) {
      if (term.coefficient < 0) throw InputError("reaction " + std::to_string(r) + " has a negative coefficient");
    }
    reaction.reactants = canonical_side(reaction.reactants);
    reaction.products = canonical_side(reaction.products);
    JumpVector jump(n, 0);
    CompiledReaction compiled;
    compiled.constant = reaction.rate_constant;
    auto check_term = [&](const Term& term) {
      if (term.species >= species_.size()) {
        throw InputError("reaction " + std::to_string(r) + " references an undeclared species");
      }
      if (term.coefficient > 0) any = true;
    };
    for (const auto& term : reaction.reactants) {
      check_term(term);
      if (const auto d = dynamic_index_[term.species]) {
        jump[*d] -= term.coefficient;
        if (term.coefficient > 0) compiled.dynamic_reactants.emplace_back(*d, term.coefficient);
      } else {
        compiled.constant *= falling_factorial(species_[term.species].fixed_count, term.coefficient);
      }
    }
    for (const auto& term : reaction.products) {
      check_term(term);
      if (const auto d = dynamic_index_[term.species]) jump[*d] += term.coefficient;
    }
    if (!any) throw InputError("reaction " + std::to_string(r) + " has no species on either side");
    jumps_.push_back(std::move(jump));
    compiled_.push_back(std::move(compiled));
  }

  if (reverse_) {
    const auto& pairing = *reverse_;
    if (pairing.size() != reactions_.size()) {
      throw InputError("reverse pairing does not cover every reaction");
    }
    for (std::size_t r = 0; r < pairing.size(); ++r) {
      const std::size_t q = pairing[r];
      if (q >= pairing.size() || pairing[q] != r) {
        throw InputError("reverse pairing of reaction " + std::to_string(r) + " is not symmetric");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (jumps_[q][i] != -jumps_[r][i]) {
          throw InputError("reactions " + std::to_string(r) + " and " + std::to_string(q) +
                           " are paired but their jump vectors are not opposite");
        }
      }
    }
  }
}

std::optional<std::size_t> ReactionNetwork::find_species(const std::string& name) const {
  for (std::size_t s = 0; s < species_.size(); ++s) {
    if (species_[s].name == name) return s;
  }
  return std::nullopt;
}

double ReactionNetwork::propensity(std::span<const std::int64_t> state, std::size_t reaction) const {
  if (reaction >= reactions_.size()) {
    throw InputError("invalid reaction id " + std::to_string(reaction));
  }
  if (state.size() != dynamic_.size()) {
    throw InputError("state dimension " + std::to_string(state.size()) + " does not match network dimension " +
                     std::to_string(dynamic_.size()));
  }
  return propensity_unchecked(state.data(), reaction);
}

double ReactionNetwork::propensity_unchecked(const std::int64_t* state, std::size_t reaction) const noexcept {
  const auto& compiled = compiled_[reaction];
  double a = compiled.constant;
  for (const auto& [d, coefficient] : compiled.dynamic_reactants) {
    const std::int64_t x = state[d];
    if (x < coefficient) return 0.0;
    for (std::int64_t i = 0; i < coefficient; ++i) a *= static_cast<double>(x - i);
  }
  return a;
}

double ReactionNetwork::total_propensity(std::span<const std::int64_t> state) const {
  double total = 0.0;
  for (std::size_t r = 0; r < reactions_.size(); ++r) total += propensity(state, r);
  return total;
}

std::size_t ReactionNetwork::reverse_channel(std::size_t reaction) const {
  if (!reverse_) throw InputError("network declares no reverse-channel pairing");
  return reverse_->at(reaction);
}

ChannelGrouping::ChannelGrouping(const ReactionNetwork& network) {
  group_of_.resize(network.reaction_count());
  for (std::size_t r = 0; r < network.reaction_count(); ++r) {
    const auto& jump = network.jump(r);
    auto [it, inserted] = index_.try_emplace(jump, groups_.size());
    if (inserted) groups_.push_back(ChannelGroup{jump, {}});
    groups_[it->second].members.push_back(r);
    group_of_[r] = it->second;
  }
  opposite_.resize(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    JumpVector negated = groups_[g].jump;
    for (auto& v : negated) v = -v;
    opposite_[g] = find(negated);
    if (groups_[g].members.size() >= 2) multigraph_ = true;
  }
}

std::optional<std::size_t> ChannelGrouping::find(const JumpVector& jump) const {
  const auto it = index_.find(jump);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double group_rate(const ReactionNetwork& network, const ChannelGroup& group, const std::int64_t* state) noexcept {
  double rate = 0.0;
  for (const auto r : group.members) rate += network.propensity_unchecked(state, r);
  return rate;
}

double lumped_rate(const ReactionNetwork& network, const ChannelGrouping& grouping,
                   std::span<const std::int64_t> state, const JumpVector& jump) {
  const auto g = grouping.find(jump);
  if (!g) throw InputError("jump vector " + format_jump(jump) + " is not produced by any reaction");
  if (state.size() != network.dimension()) throw InputError("state dimension does not match network");
  return group_rate(network, grouping.groups()[*g], state.data());
}

std::string format_jump(const JumpVector& jump) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < jump.size(); ++i) {
    if (i) out << ',';
    if (jump[i] > 0) out << '+';
    out << jump[i];
  }
  out << ')';
  return out.str();
}

}  // namespace paththerm
