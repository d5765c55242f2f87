#include "paththerm/presets.hpp"

#include <cmath>
#include <set>

#include "paththerm/error.hpp"

namespace paththerm {

namespace {

class Parameters {
 public:
  Parameters(std::string preset, const ParameterMap& given) : preset_(std::move(preset)), given_(given) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = given_.find(key);
    return it == given_.end() ? fallback : it->second;
  }

  double require(const std::string& key) {
    used_.insert(key);
    const auto it = given_.find(key);
    if (it == given_.end()) throw InputError("preset '" + preset_ + "' requires parameter '" + key + "'");
    return it->second;
  }

  std::int64_t count(const std::string& key, double value) const {
    if (!(value >= 0.0) || std::floor(value) != value) {
      throw InputError("preset '" + preset_ + "': parameter '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::int64_t>(value);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : given_) {
      if (!used_.count(key)) throw InputError("preset '" + preset_ + "' has no parameter '" + key + "'");
    }
  }

 private:
  std::string preset_;
  const ParameterMap& given_;
  std::set<std::string> used_;
};

std::vector<std::size_t> adjacent_pairing(std::size_t reactions) {
  std::vector<std::size_t> pairing(reactions);
  for (std::size_t r = 0; r < reactions; ++r) pairing[r] = r ^ 1U;
  return pairing;
}

Reaction make_reaction(std::vector<Term> reactants, std::vector<Term> products, double k) {
  Reaction reaction;
  reaction.reactants = std::move(reactants);
  reaction.products = std::move(products);
  reaction.rate_constant = k;
  return reaction;
}

PresetModel schlogl(Parameters& p) {
  const auto defaults = schlogl_pstar();
  const double k1 = p.get("k1", defaults.at("k1"));
  const double k2 = p.get("k2", defaults.at("k2"));
  const double k3 = p.get("k3", defaults.at("k3"));
  const double k4 = p.get("k4", defaults.at("k4"));
  const auto a = p.count("A", p.get("A", defaults.at("A")));
  const auto b = p.count("B", p.get("B", defaults.at("B")));
  // Species indices: X = 0, A = 1, B = 2.
  std::vector<Species> species{{"X", SpeciesKind::dynamic, 0},
                               {"A", SpeciesKind::chemostatted, a},
                               {"B", SpeciesKind::chemostatted, b}};
  std::vector<Reaction> reactions;
  reactions.push_back(make_reaction({{1, 1}, {0, 2}}, {{0, 3}}, k1));
  reactions.push_back(make_reaction({{0, 3}}, {{1, 1}, {0, 2}}, k2));
  reactions.push_back(make_reaction({{2, 1}}, {{0, 1}}, k3));
  reactions.push_back(make_reaction({{0, 1}}, {{2, 1}}, k4));
  return PresetModel{ReactionNetwork(std::move(species), std::move(reactions), adjacent_pairing(4)), {20}, {200}, 1.0};
}

PresetModel scheme1(Parameters& p) {
  const double r_value = p.require("R");
  const auto channels = p.count("R", r_value);
  if (channels < 1) throw InputError("preset 'scheme1' needs R >= 1");
  std::vector<Species> species{{"X", SpeciesKind::dynamic, 0}};
  std::vector<Reaction> reactions;
  for (std::int64_t rho = 1; rho <= channels; ++rho) {
    const std::string tag = std::to_string(rho);
    const double kf = p.require("k" + tag);
    const double kb = p.require("km" + tag);
    const auto a = p.count("A" + tag, p.get("A" + tag, 1));
    const auto b = p.count("B" + tag, p.get("B" + tag, 1));
    const std::size_t ia = species.size();
    species.push_back({"A" + tag, SpeciesKind::chemostatted, a});
    const std::size_t ib = species.size();
    species.push_back({"B" + tag, SpeciesKind::chemostatted, b});
    std::vector<Term> left{{ia, 1}};
    if (rho > 1) left.push_back({0, rho - 1});
    std::vector<Term> right{{ib, 1}, {0, rho}};
    reactions.push_back(make_reaction(left, right, kf));
    reactions.push_back(make_reaction(right, left, kb));
  }
  const std::size_t count = reactions.size();
  return PresetModel{ReactionNetwork(std::move(species), std::move(reactions), adjacent_pairing(count)), {0}, {200}, 1.0};
}

PresetModel xy_pair(Parameters& p) {
  const double k1 = p.get("k1", 1.0);
  const double km1 = p.get("km1", 1.0);
  const double k2 = p.get("k2", 0.1);
  const double km2 = p.get("km2", 0.1);
  const auto n = p.count("n", p.get("n", 10));
  std::vector<Species> species{{"X", SpeciesKind::dynamic, 0}, {"Y", SpeciesKind::dynamic, 0}};
  std::vector<Reaction> reactions;
  reactions.push_back(make_reaction({{0, 1}}, {{1, 1}}, k1));
  reactions.push_back(make_reaction({{1, 1}}, {{0, 1}}, km1));
  reactions.push_back(make_reaction({{0, 1}, {1, 1}}, {{1, 2}}, k2));
  reactions.push_back(make_reaction({{1, 2}}, {{0, 1}, {1, 1}}, km2));
  return PresetModel{ReactionNetwork(std::move(species), std::move(reactions), adjacent_pairing(4)), {n, 0}, {n, n}, 1.0};
}

PresetModel driven_cycle(Parameters& p) {
  const double kxy = p.get("k_xy", 2.0);
  const double kyx = p.get("k_yx", 1.0);
  const double kyz = p.get("k_yz", 1.5);
  const double kzy = p.get("k_zy", 1.0);
  const double kzx = p.get("k_zx", 1.0);
  const double kxz = p.get("k_xz", 0.8);
  const auto n = p.count("n", p.get("n", 5));
  if (n < 1) throw InputError("preset 'driven_cycle' needs n >= 1");
  std::vector<Species> species{
      {"X", SpeciesKind::dynamic, 0}, {"Y", SpeciesKind::dynamic, 0}, {"Z", SpeciesKind::dynamic, 0}};
  std::vector<Reaction> reactions;
  reactions.push_back(make_reaction({{0, 1}}, {{1, 1}}, kxy));
  reactions.push_back(make_reaction({{1, 1}}, {{0, 1}}, kyx));
  reactions.push_back(make_reaction({{1, 1}}, {{2, 1}}, kyz));
  reactions.push_back(make_reaction({{2, 1}}, {{1, 1}}, kzy));
  reactions.push_back(make_reaction({{2, 1}}, {{0, 1}}, kzx));
  reactions.push_back(make_reaction({{0, 1}}, {{2, 1}}, kxz));
  return PresetModel{ReactionNetwork(std::move(species), std::move(reactions), adjacent_pairing(6)),
                     {n, 0, 0}, {n, n, n}, 1.0};
}

PresetModel birth_death(Parameters& p) {
  const double kf = p.get("k_f", 1.0);
  const double kb = p.get("k_b", 1.0);
  const auto a = p.count("A", p.get("A", 10));
  std::vector<Species> species{{"X", SpeciesKind::dynamic, 0}, {"A", SpeciesKind::chemostatted, a}};
  std::vector<Reaction> reactions;
  reactions.push_back(make_reaction({{1, 1}}, {{0, 1}}, kf));
  reactions.push_back(make_reaction({{0, 1}}, {{1, 1}}, kb));
  return PresetModel{ReactionNetwork(std::move(species), std::move(reactions), adjacent_pairing(2)), {10}, {60}, 1.0};
}

}  // namespace

ParameterMap schlogl_pstar() {
  return {{"k1", 0.003}, {"A", 10}, {"k2", 0.001}, {"k3", 2.0}, {"B", 10}, {"k4", 1.0}};
}

std::vector<std::string> preset_names() { return {"schlogl", "scheme1", "xy_pair", "driven_cycle", "birth_death"}; }

PresetModel preset_model(const std::string& name, const ParameterMap& parameters) {
  Parameters p(name, parameters);
  PresetModel model = [&]() -> PresetModel {
    if (name == "schlogl") return schlogl(p);
    if (name == "scheme1") return scheme1(p);
    if (name == "xy_pair") return xy_pair(p);
    if (name == "driven_cycle") return driven_cycle(p);
    if (name == "birth_death") return birth_death(p);
    throw InputError("unknown preset '" + name + "'");
  }();
  p.reject_unknown();
  return model;
}

}  // namespace paththerm
