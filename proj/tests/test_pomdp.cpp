#include <gtest/gtest.h>

#include <random>

#include "dtfsc/bench.hpp"
#include "dtfsc/error.hpp"
#include "dtfsc/pomdp.hpp"
#include "support/oracle.hpp"

using namespace dtfsc;

namespace {

/// Two states share observation {0} but `b` is enabled in only one of them.
Pomdp shared_observation_model() {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"a", "b"});
  const StateId s0 = b.add_state({0});
  const StateId s1 = b.add_state({0});
  const StateId goal = b.add_state({1});
  b.set_transition(s0, 0, {{s1, 1.0}});
  b.set_transition(s0, 1, {{goal, 1.0}});
  b.set_transition(s1, 0, {{goal, 1.0}});
  b.set_transition(goal, 0, {{goal, 1.0}});
  b.set_init(s0);
  b.add_target(goal);
  return std::move(b).build();
}

}  // namespace

TEST(Pomdp, StatesSharingObservationMustEnableSameActions) {
  EXPECT_THROW(shared_observation_model(), ModelError);
}

TEST(Pomdp, UnknownObservationHasNoActions) {
  const Pomdp m = gen_line();
  EXPECT_THROW(enabled_actions(m, Observation{7}), UnknownObservationError);
}

TEST(Pomdp, MazeCorridorAllowsOnlyVerticalMoves) {
  const Pomdp m = gen_maze();
  const Observation ud{1, 0, 0, 1, 0, 1, 0};
  // down = 0, up = 3
  EXPECT_EQ(enabled_actions(m, ud), (std::vector<ActionId>{0, 3}));
}

TEST(Pomdp, ObservationIdsFollowLexicographicOrder) {
  const Pomdp m = gen_maze();
  for (ObsId z = 1; z < m.num_observations(); ++z) EXPECT_LT(m.observation(z - 1), m.observation(z));
}

TEST(Pomdp, BuilderRejectsBadDistributions) {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"a"});
  const StateId s = b.add_state({0});
  b.set_transition(s, 0, {{s, 0.9}});
  b.add_target(s);
  EXPECT_THROW(std::move(b).build(), ModelError);
}

TEST(Pomdp, BuilderRejectsDeadStates) {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"a"});
  const StateId s = b.add_state({0});
  b.add_state({1});
  b.set_transition(s, 0, {{s, 1.0}});
  EXPECT_THROW(std::move(b).build(), ModelError);
}

TEST(Pomdp, BuilderRejectsObservationOutsideDomain) {
  PomdpBuilder b({FeatureSpec::integer("x", 0, 2)}, {"a"});
  EXPECT_THROW(
      {
        const StateId s = b.add_state({3});
        b.set_transition(s, 0, {{s, 1.0}});
        std::move(b).build();
      },
      ModelError);
}

TEST(Pomdp, TargetObservationMustBeExclusive) {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"a"});
  const StateId s0 = b.add_state({1});
  const StateId s1 = b.add_state({1});
  b.set_transition(s0, 0, {{s1, 1.0}});
  b.set_transition(s1, 0, {{s1, 1.0}});
  b.add_target(s1);
  EXPECT_THROW(std::move(b).build(), ModelError);
}

TEST(Pomdp, DuplicateFeatureNamesRejected) {
  const std::vector<FeatureSpec> f{FeatureSpec::boolean("x"), FeatureSpec::boolean("x")};
  EXPECT_THROW(validate_features(f), ModelError);
}

TEST(InducedChain, LinePolicyReachesGoal) {
  const Pomdp m = gen_line();
  StationaryObsPolicy p;
  p.choice[Observation{0}] = 1;
  p.choice[Observation{1}] = 1;
  const InducedChain c = induce_chain(m, p, {});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.chosen(0), std::optional<ActionId>(1));
  EXPECT_TRUE(c.is_absorbing(2));
  const std::vector<StateId> goal{2};
  EXPECT_TRUE(almost_sure_reach(c, goal, 0));
}

TEST(InducedChain, FrontierStatesAreAbsorbing) {
  const Pomdp m = gen_line();
  StationaryObsPolicy p;
  p.choice[Observation{0}] = 1;
  const std::vector<Observation> frontier{Observation{1}};
  const InducedChain c = induce_chain(m, p, frontier);
  EXPECT_TRUE(c.is_absorbing(1));
  EXPECT_FALSE(c.chosen(1).has_value());
  const std::vector<StateId> goal{1};
  EXPECT_TRUE(almost_sure_reach(c, goal, 0));
}

TEST(InducedChain, LeftLoopNeverReaches) {
  const Pomdp m = gen_line();
  StationaryObsPolicy p;
  p.choice[Observation{0}] = 0;
  p.choice[Observation{1}] = 1;
  const InducedChain c = induce_chain(m, p, {});
  const std::vector<StateId> goal{2};
  EXPECT_FALSE(almost_sure_reach(c, goal, 0));
  EXPECT_TRUE(almost_sure_reach(c, goal, 1));
}

TEST(InducedChain, MissingChoiceOnReachableStateThrows) {
  const Pomdp m = gen_line();
  StationaryObsPolicy p;
  p.choice[Observation{0}] = 1;
  EXPECT_THROW(induce_chain(m, p, {}), MissingChoiceError);
}

namespace {

/// Random chain over `n` states with sparse supports; state 0 is the goal.
oracle::Chain random_chain(std::mt19937_64& gen, std::size_t n) {
  oracle::Chain c;
  c.succ.resize(n);
  c.goal.assign(n, false);
  c.goal[0] = true;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> fan(1, 3);
  for (std::size_t s = 0; s < n; ++s) {
    const int k = fan(gen);
    std::set<std::size_t> targets;
    for (int i = 0; i < k; ++i) targets.insert(pick(gen));
    for (std::size_t t : targets) c.succ[s].push_back({t, 1.0 / static_cast<double>(targets.size())});
  }
  c.init = pick(gen);
  return c;
}

InducedChain to_induced(const oracle::Chain& c) {
  InducedChain ic;
  for (std::size_t s = 0; s < c.succ.size(); ++s) {
    std::vector<Outcome> out;
    for (auto [t, p] : c.succ[s]) out.push_back({static_cast<StateId>(t), p});
    ic.add_state(out, ActionId{0});
  }
  return ic;
}

}  // namespace

TEST(AlmostSureReach, AgreesWithValueIteration) {
  std::mt19937_64 gen(7);
  int positives = 0;
  for (int round = 0; round < 300; ++round) {
    const oracle::Chain c = random_chain(gen, 2 + round % 12);
    const InducedChain ic = to_induced(c);
    const bool graph = almost_sure_reach(ic, c.goal, static_cast<StateId>(c.init));
    const double v = oracle::reach_probability(c);
    EXPECT_EQ(graph, 1.0 - v < oracle::kTolerance) << "round " << round << " value " << v;
    positives += graph;
  }
  EXPECT_GT(positives, 20);
  EXPECT_LT(positives, 280);
}

TEST(AlmostSureReach, CanReachIsBackwardClosure) {
  std::mt19937_64 gen(11);
  for (int round = 0; round < 100; ++round) {
    const oracle::Chain c = random_chain(gen, 8);
    const InducedChain ic = to_induced(c);
    const std::vector<bool> r = can_reach(ic, c.goal);
    const std::vector<double> v = oracle::reach_values(c);
    for (std::size_t s = 0; s < v.size(); ++s) EXPECT_EQ(r[s], v[s] > 0.0);
  }
}
