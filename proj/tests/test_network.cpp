#include <gtest/gtest.h>

#include <random>

#include "paththerm/error.hpp"
#include "paththerm/network.hpp"
#include "paththerm/presets.hpp"

using namespace paththerm;

namespace {

void expect_same_network(const ReactionNetwork& a, const ReactionNetwork& b) {
  ASSERT_EQ(a.species().size(), b.species().size());
  for (std::size_t i = 0; i < a.species().size(); ++i) {
    EXPECT_EQ(a.species()[i].name, b.species()[i].name);
    EXPECT_EQ(a.species()[i].kind, b.species()[i].kind);
    EXPECT_EQ(a.species()[i].fixed_count, b.species()[i].fixed_count);
  }
  ASSERT_EQ(a.reaction_count(), b.reaction_count());
  for (std::size_t r = 0; r < a.reaction_count(); ++r) {
    EXPECT_EQ(a.reactions()[r].reactants, b.reactions()[r].reactants);
    EXPECT_EQ(a.reactions()[r].products, b.reactions()[r].products);
    EXPECT_EQ(a.reactions()[r].rate_constant, b.reactions()[r].rate_constant);
    EXPECT_EQ(a.jump(r), b.jump(r));
  }
  ASSERT_EQ(a.has_reverse_pairing(), b.has_reverse_pairing());
  if (a.has_reverse_pairing()) {
    for (std::size_t r = 0; r < a.reaction_count(); ++r) EXPECT_EQ(a.reverse_channel(r), b.reverse_channel(r));
  }
}

}  // namespace

TEST(Parse, ChemostatBirthDeath) {
  const auto net = parse_network("species X\nconst A = 10\nreaction A -> X : 2.0\nreaction X -> A : 1.0");
  EXPECT_EQ(net.dimension(), 1u);
  EXPECT_EQ(net.reaction_count(), 2u);
  EXPECT_EQ(net.jump(0), JumpVector{1});
  EXPECT_EQ(net.jump(1), JumpVector{-1});
}

TEST(Parse, SharedJumpPair) {
  const auto net = parse_network("species X Y\nreaction X -> Y : 1.0\nreaction X + Y -> 2 Y : 1.0");
  EXPECT_EQ(net.jump(0), (JumpVector{-1, 1}));
  EXPECT_EQ(net.jump(1), (JumpVector{-1, 1}));
}

TEST(Parse, UndeclaredSpecies) {
  try {
    parse_network("reaction X -> Y : 1.0");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("undeclared species 'X'"), std::string::npos);
  }
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_network("species X X"), ParseError);
  EXPECT_THROW(parse_network("species X\nconst X = 3"), ParseError);
  EXPECT_THROW(parse_network("species X\nreaction X -> 0 : 0"), ParseError);
  EXPECT_THROW(parse_network("species X\nreaction X -> 0 : -1"), ParseError);
  EXPECT_THROW(parse_network("species X\nreaction X => 0 : 1"), ParseError);
  EXPECT_THROW(parse_network("species X\nreaction X -> 0 1"), ParseError);
  EXPECT_THROW(parse_network("species X\nfoo X"), ParseError);
  EXPECT_THROW(parse_network("species 1X"), ParseError);
  EXPECT_THROW(parse_network("const A = 3\nreaction A -> 0 : 1"), InputError);  // no dynamic species
}

TEST(Parse, ErrorLocation) {
  try {
    parse_network("species X\n\nreaction X -> Q : 1.0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 15u);
  }
}

TEST(Parse, CommentsScientificAndEmptySide) {
  const auto net = parse_network(
      "# header\nspecies X   # the only one\nreaction 0 -> X : 1.5e-3\nreaction 2X -> X : 2E2\nreaction X -> 0 : 1\nreaction X -> 2 X : 1\npair 0 2\npair 1 3\n");
  EXPECT_EQ(net.reaction_count(), 4u);
  EXPECT_DOUBLE_EQ(net.reactions()[0].rate_constant, 1.5e-3);
  EXPECT_DOUBLE_EQ(net.reactions()[1].rate_constant, 200.0);
  EXPECT_EQ(net.jump(1), JumpVector{-1});
  EXPECT_EQ(net.reactions()[1].reactants, (std::vector<Term>{{0, 2}}));
  EXPECT_TRUE(net.reactions()[2].products.empty());
  EXPECT_EQ(net.reverse_channel(0), 2u);
}

TEST(Parse, BadPairing) {
  EXPECT_THROW(parse_network("species X\nreaction 0 -> X : 1\nreaction X -> 0 : 1\npair 0 0"), ParseError);
  EXPECT_THROW(parse_network("species X\nreaction 0 -> X : 1\nreaction 0 -> X : 1\npair 0 1"), ParseError);
  EXPECT_THROW(parse_network("species X\nreaction 0 -> X : 1\nreaction X -> 0 : 1\npair 0 7"), ParseError);
}

TEST(Propensity, FallingFactorial) {
  const auto net = parse_network("species X\nreaction 2 X -> 0 : 2.0");
  EXPECT_DOUBLE_EQ(net.propensity(State{5}, 0), 40.0);
  EXPECT_DOUBLE_EQ(net.propensity(State{1}, 0), 0.0);
  EXPECT_THROW(net.propensity(State{5}, 3), InputError);
  EXPECT_THROW(net.propensity(State{5, 1}, 0), InputError);
}

TEST(Propensity, SchemeOneSecondChannel) {
  const auto net = preset("scheme1", {{"R", 2}, {"k1", 1}, {"km1", 1}, {"k2", 0.5}, {"km2", 1}, {"A2", 10}});
  EXPECT_DOUBLE_EQ(net.propensity(State{3}, 2), 15.0);
}

TEST(Propensity, RepeatedSpeciesOnOneSide) {
  // X + X must count pairs, like 2 X.
  const auto a = parse_network("species X\nreaction X + X -> 0 : 1");
  const auto b = parse_network("species X\nreaction 2 X -> 0 : 1");
  for (std::int64_t x = 0; x < 6; ++x) EXPECT_DOUBLE_EQ(a.propensity(State{x}, 0), b.propensity(State{x}, 0));
}

TEST(Propensity, ZeroExactlyWhenShort) {
  const auto net = parse_network("species X Y\nreaction 2 X + 3 Y -> 0 : 0.7\nreaction 0 -> X : 1");
  for (std::int64_t x = 0; x < 5; ++x) {
    for (std::int64_t y = 0; y < 6; ++y) {
      const bool short_of = x < 2 || y < 3;
      EXPECT_EQ(net.propensity(State{x, y}, 0) == 0.0, short_of) << x << "," << y;
    }
  }
}

TEST(Grouping, SharedJumpIsMultigraph) {
  const auto net = parse_network("species X Y\nreaction X -> Y : 1.0\nreaction X + Y -> 2 Y : 1.0");
  const ChannelGrouping g(net);
  ASSERT_EQ(g.groups().size(), 1u);
  EXPECT_EQ(g.groups()[0].jump, (JumpVector{-1, 1}));
  EXPECT_EQ(g.groups()[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(g.multigraph());
}

TEST(Grouping, BirthDeathIsSimple) {
  const auto g = group_channels(parse_network("species X\nconst A = 1\nreaction A -> X : 1\nreaction X -> A : 1"));
  EXPECT_EQ(g.groups().size(), 2u);
  EXPECT_FALSE(g.multigraph());
  EXPECT_EQ(g.opposite(0), std::optional<std::size_t>(1));
}

TEST(Grouping, SchloglHasTwoPairs) {
  const auto net = preset("schlogl", schlogl_pstar());
  EXPECT_EQ(net.reaction_count(), 4u);
  const ChannelGrouping g(net);
  ASSERT_EQ(g.groups().size(), 2u);
  EXPECT_EQ(g.groups()[0].members.size(), 2u);
  EXPECT_EQ(g.groups()[1].members.size(), 2u);
  EXPECT_TRUE(g.multigraph());
}

TEST(Grouping, PartitionsAllPresets) {
  const std::vector<std::pair<std::string, ParameterMap>> cases{
      {"schlogl", {}}, {"xy_pair", {}}, {"driven_cycle", {}}, {"birth_death", {}},
      {"scheme1", {{"R", 3}, {"k1", 1}, {"km1", 1}, {"k2", 1}, {"km2", 1}, {"k3", 1}, {"km3", 1}}}};
  for (const auto& [name, params] : cases) {
    const auto net = preset(name, params);
    const ChannelGrouping g(net);
    std::vector<int> seen(net.reaction_count(), 0);
    bool big = false;
    for (std::size_t k = 0; k < g.groups().size(); ++k) {
      big = big || g.groups()[k].members.size() >= 2;
      for (const auto r : g.groups()[k].members) {
        ++seen[r];
        EXPECT_EQ(g.group_of(r), k);
        EXPECT_EQ(net.jump(r), g.groups()[k].jump);
      }
    }
    for (const int s : seen) EXPECT_EQ(s, 1) << name;
    EXPECT_EQ(big, g.multigraph()) << name;
  }
}

TEST(LumpedRate, SumsTheGroup) {
  const auto net = preset("scheme1", {{"R", 2}, {"k1", 2}, {"km1", 1}, {"k2", 3}, {"km2", 1}});
  const ChannelGrouping g(net);
  // At X = 1: lambda_1 = k1 A1 = 2, lambda_2 = k2 A2 X = 3.
  EXPECT_DOUBLE_EQ(lumped_rate(net, g, State{1}, JumpVector{1}), 5.0);
  EXPECT_THROW(lumped_rate(net, g, State{1}, JumpVector{2}), InputError);
}

TEST(LumpedRate, SingletonEqualsPropensity) {
  const auto net = preset("birth_death");
  const ChannelGrouping g(net);
  for (std::int64_t x = 0; x < 20; ++x) {
    EXPECT_DOUBLE_EQ(lumped_rate(net, g, State{x}, JumpVector{-1}), net.propensity(State{x}, 1));
  }
}

TEST(LumpedRate, SchloglByHand) {
  const auto net = preset("schlogl", schlogl_pstar());
  const ChannelGrouping g(net);
  // +1: k1 A X(X-1) + k3 B = 0.003*10*90 + 2*10; -1: k2 X(X-1)(X-2) + k4 X = 0.001*720 + 10.
  EXPECT_NEAR(lumped_rate(net, g, State{10}, JumpVector{1}), 0.003 * 10 * 90 + 20.0, 1e-12);
  EXPECT_NEAR(lumped_rate(net, g, State{10}, JumpVector{-1}), 0.001 * 720 + 10.0, 1e-12);
}

TEST(LumpedRate, ExhaustiveSumOnSmallBox) {
  const auto net = preset("xy_pair");
  const ChannelGrouping g(net);
  for (std::int64_t x = 0; x <= 6; ++x) {
    for (std::int64_t y = 0; y <= 6; ++y) {
      const State s{x, y};
      for (const auto& group : g.groups()) {
        double sum = 0.0;
        for (const auto r : group.members) sum += net.propensity(s, r);
        EXPECT_DOUBLE_EQ(lumped_rate(net, g, s, group.jump), sum);
      }
    }
  }
}

TEST(Presets, Shapes) {
  EXPECT_EQ(preset("birth_death", {{"k_f", 1}, {"k_b", 2}}).reaction_count(), 2u);
  EXPECT_FALSE(ChannelGrouping(preset("birth_death")).multigraph());
  const auto cycle = preset("driven_cycle", {{"k_xy", 3}, {"k_yx", 1}});
  EXPECT_EQ(cycle.reaction_count(), 6u);
  const ChannelGrouping g(cycle);
  EXPECT_EQ(g.groups().size(), 6u);
  EXPECT_FALSE(g.multigraph());
  EXPECT_TRUE(ChannelGrouping(preset("xy_pair")).multigraph());
}

TEST(Presets, Errors) {
  EXPECT_THROW(preset("nope"), InputError);
  EXPECT_THROW(preset("scheme1", {{"R", 2}, {"k1", 1}, {"km1", 1}}), InputError);
  EXPECT_THROW(preset("birth_death", {{"kf", 1}}), InputError);
}

TEST(Serialize, RoundTripPresets) {
  for (const auto& name : preset_names()) {
    const ParameterMap params = name == "scheme1"
                                    ? ParameterMap{{"R", 3}, {"k1", 0.1}, {"km1", 1}, {"k2", 0.3}, {"km2", 1.0 / 3},
                                                   {"k3", 1e-3}, {"km3", 7}, {"A3", 12}}
                                    : ParameterMap{};
    const auto net = preset(name, params);
    expect_same_network(net, parse_network(serialize_network(net)));
  }
}

TEST(Serialize, RoundTripRandomNetworks) {
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<int> coef(0, 3);
  std::uniform_real_distribution<double> rate(-6, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Species> species{{"X", SpeciesKind::dynamic, 0}, {"Y_2", SpeciesKind::dynamic, 0},
                                 {"C", SpeciesKind::chemostatted, trial % 7}};
    std::vector<Reaction> reactions;
    const int count = 1 + trial % 5;
    for (int r = 0; r < count; ++r) {
      Reaction reaction;
      for (std::size_t s = 0; s < species.size(); ++s) {
        if (const int c = coef(gen)) reaction.reactants.push_back({s, c});
        if (const int c = coef(gen)) reaction.products.push_back({s, c});
      }
      if (reaction.reactants.empty() && reaction.products.empty()) reaction.products.push_back({0, 1});
      reaction.rate_constant = std::pow(10.0, rate(gen));
      reactions.push_back(reaction);
    }
    const ReactionNetwork net(species, reactions);
    expect_same_network(net, parse_network(serialize_network(net)));
  }
}
