#ifndef PATHTHERM_NETWORK_HPP
#define PATHTHERM_NETWORK_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace paththerm {

/// Copy numbers of the dynamic species, in declaration order.
using State = std::vector<std::int64_t>;

/// Net change of the dynamic copy numbers caused by one reaction event.
using JumpVector = std::vector<std::int64_t>;

enum class SpeciesKind { dynamic, chemostatted };

struct Species {
  std::string name;
  SpeciesKind kind = SpeciesKind::dynamic;
  /// Reservoir copy number; meaningful for chemostatted species only.
  std::int64_t fixed_count = 0;
};

/// One side of a reaction: species index (into the network's species list)
/// and stoichiometric coefficient.
struct Term {
  std::size_t species = 0;
  std::int64_t coefficient = 0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// An elementary, irreversible reaction channel. A reversible pair is two
/// records.
struct Reaction {
  std::size_t id = 0;
  std::vector<Term> reactants;
  std::vector<Term> products;
  double rate_constant = 0.0;
};

/// Immutable, validated reaction network.
///
/// Propensities follow combinatorial mass action: a_rho(X) = k_rho *
/// prod_s ff(X_s, r_rho,s), where ff is the falling factorial and
/// chemostatted species contribute their fixed copy number. Rate constants are
/// taken as already volume-scaled.
class ReactionNetwork {
 public:
  /// Validates and builds the network. Throws InputError when a species name
  /// is duplicated, a term references an unknown species, a rate constant is
  /// not positive, a reaction is empty, no dynamic species exists, or the
  /// reverse pairing is inconsistent.
  ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions,
                  std::optional<std::vector<std::size_t>> reverse_pairing = std::nullopt);

  const std::vector<Species>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  std::size_t reaction_count() const noexcept { return reactions_.size(); }

  /// Number of dynamic species N.
  std::size_t dimension() const noexcept { return dynamic_.size(); }

  /// Species index of the i-th dynamic species.
  std::size_t dynamic_species(std::size_t i) const { return dynamic_.at(i); }
  const std::string& dynamic_name(std::size_t i) const { return species_.at(dynamic_.at(i)).name; }

  std::optional<std::size_t> find_species(const std::string& name) const;

  const JumpVector& jump(std::size_t reaction) const { return jumps_.at(reaction); }

  /// Mass-action propensity of `reaction` at `state`. Throws InputError on an
  /// invalid reaction id or a state of the wrong dimension.
  double propensity(std::span<const std::int64_t> state, std::size_t reaction) const;

  /// Unchecked variant used on hot paths.
  double propensity_unchecked(const std::int64_t* state, std::size_t reaction) const noexcept;

  /// Sum of all channel propensities.
  double total_propensity(std::span<const std::int64_t> state) const;

  bool has_reverse_pairing() const noexcept { return reverse_.has_value(); }

  /// Declared reverse channel of `reaction`. Throws InputError if the network
  /// has no pairing.
  std::size_t reverse_channel(std::size_t reaction) const;

 private:
  struct CompiledReaction {
    double constant = 0.0;  // k times chemostat falling factorials
    std::vector<std::pair<std::size_t, std::int64_t>> dynamic_reactants;  // (dynamic index, coefficient)
  };

  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::vector<std::size_t> dynamic_;
  std::vector<std::optional<std::size_t>> dynamic_index_;  // species index -> dynamic index
  std::vector<JumpVector> jumps_;
  std::vector<CompiledReaction> compiled_;
  std::optional<std::vector<std::size_t>> reverse_;
};

using NetworkPtr = std::shared_ptr<const ReactionNetwork>;

/// Falling factorial n (n-1) ... (n-k+1) as a double; zero when n < k.
double falling_factorial(std::int64_t n, std::int64_t k) noexcept;

/// Reactions with equal jump vectors, in order of first appearance.
struct ChannelGroup {
  JumpVector jump;
  std::vector<std::size_t> members;
};

/// Partition of the reaction channels by jump vector. A network is in a
/// "multigraph" situation when two channels produce the same state change and
/// are therefore indistinguishable from the state-level path.
class ChannelGrouping {
 public:
  explicit ChannelGrouping(const ReactionNetwork& network);

  const std::vector<ChannelGroup>& groups() const noexcept { return groups_; }
  bool multigraph() const noexcept { return multigraph_; }

  std::size_t group_of(std::size_t reaction) const { return group_of_.at(reaction); }
  std::optional<std::size_t> find(const JumpVector& jump) const;

  /// Group holding the opposite jump -nu of group g, if any.
  std::optional<std::size_t> opposite(std::size_t group) const { return opposite_.at(group); }

 private:
  std::vector<ChannelGroup> groups_;
  std::map<JumpVector, std::size_t> index_;
  std::vector<std::size_t> group_of_;
  std::vector<std::optional<std::size_t>> opposite_;
  bool multigraph_ = false;
};

inline ChannelGrouping group_channels(const ReactionNetwork& network) {
  return ChannelGrouping(network);
}

/// Sum of the propensities of every channel sharing jump vector `jump`.
/// Throws InputError for a jump vector that is not a key of the grouping.
double lumped_rate(const ReactionNetwork& network, const ChannelGrouping& grouping,
                   std::span<const std::int64_t> state, const JumpVector& jump);

/// Same, addressed by group index.
double group_rate(const ReactionNetwork& network, const ChannelGroup& group,
                  const std::int64_t* state) noexcept;

/// Parses the line-oriented network description format.
ReactionNetwork parse_network(const std::string& text);
ReactionNetwork load_network_file(const std::string& path);

/// Writes the network back in the description format; parse_network of the
/// result reproduces the network.
std::string serialize_network(const ReactionNetwork& network);

std::string format_jump(const JumpVector& jump);

}  // namespace paththerm

#endif  // PATHTHERM_NETWORK_HPP
