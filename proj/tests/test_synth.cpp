#include <gtest/gtest.h>

#include "dtfsc/bench.hpp"
#include "dtfsc/error.hpp"
#include "dtfsc/io.hpp"
#include "dtfsc/synth.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace dtfsc;

namespace {

/// Observations newly winning under `policy` given `won`, recomputed by value
/// iteration over the model with won and target observations as goal.
std::set<Observation> winning_under(const Pomdp& m, const StationaryObsPolicy& policy,
                                    const std::set<Observation>& won) {
  oracle::Chain c;
  c.succ.resize(m.num_states());
  c.goal.assign(m.num_states(), false);
  for (StateId s = 0; s < m.num_states(); ++s) {
    const Observation& z = m.observation_of(s);
    if (m.is_target(s) || won.count(z)) {
      c.goal[s] = true;
      continue;
    }
    for (const auto& o : *m.transition(s, policy.choice.at(z))) c.succ[s].push_back({o.state, o.probability});
  }
  const auto v = oracle::reach_values(c);
  std::set<Observation> out;
  for (ObsId z = 0; z < m.num_observations(); ++z) {
    const Observation& zo = m.observation(z);
    if (m.is_target_observation(z) || won.count(zo)) continue;
    bool all = true;
    for (StateId s : m.states_with(z)) all &= 1.0 - v[s] < oracle::kTolerance;
    if (all) out.insert(zo);
  }
  return out;
}

}  // namespace

TEST(Synth, LineFirstIterationWinsMidWithRight) {
  const Pomdp m = gen_line();
  const auto it = find_iteration_policy(m, {});
  ASSERT_TRUE(it.has_value());
  EXPECT_EQ(it->won, std::vector<Observation>{Observation{1}});
  EXPECT_EQ(it->policy.choice.at(Observation{1}), 1u);
}

TEST(Synth, LineControllerHasTwoNodes) {
  const SynthResult r = synthesize(gen_line());
  EXPECT_EQ(r.fsc.num_nodes, 2u);
  EXPECT_EQ(r.fsc.init_node, 1u);
  EXPECT_EQ(r.index.iteration.at(Observation{1}), 0u);
  EXPECT_EQ(r.index.iteration.at(Observation{0}), 1u);
  EXPECT_EQ(r.index.iteration.size(), 2u);
  EXPECT_EQ(r.fsc.find_gamma(1, {0})->id, 1u);
  EXPECT_EQ(r.fsc.find_delta(1, {0}, {1}), std::optional<NodeId>(0));
}

TEST(Synth, InitialTargetGivesSingleNode) {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"stay"});
  const StateId s = b.add_state({1});
  b.set_transition(s, 0, {{s, 1.0}});
  b.add_target(s);
  const SynthResult r = synthesize(std::move(b).build());
  EXPECT_EQ(r.fsc.num_nodes, 1u);
  EXPECT_TRUE(r.index.iteration.empty());
}

TEST(Synth, HopelessModelThrows) {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"stay"});
  const StateId s = b.add_state({0});
  const StateId t = b.add_state({1});
  b.set_transition(s, 0, {{s, 1.0}});
  b.set_transition(t, 0, {{t, 1.0}});
  b.add_target(t);
  EXPECT_THROW(synthesize(std::move(b).build()), SynthesisError);
}

TEST(Synth, WonSetsAreMaximalForTheChosenPolicy) {
  for (const auto& name : {"line", "maze", "obstacle-6"}) {
    const Pomdp& m = fixtures::model(name);
    std::set<Observation> won;
    for (int i = 0; i < 10; ++i) {
      const auto it = find_iteration_policy(m, won);
      if (!it) break;
      const std::set<Observation> fresh(it->won.begin(), it->won.end());
      EXPECT_EQ(fresh, winning_under(m, it->policy, won)) << name << " iteration " << i;
      EXPECT_FALSE(fresh.empty());
      won.insert(fresh.begin(), fresh.end());
      if (won.count(m.observation_of(m.init()))) break;
    }
    EXPECT_TRUE(won.count(m.observation_of(m.init()))) << name;
  }
}

TEST(Synth, ControllersReachTargetAlmostSurely) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    const Pomdp& m = fixtures::model(name);
    validate(r.fsc);
    validate_against(r.fsc, m);
    const ProductChain pc = product_chain(r.fsc, m);
    EXPECT_TRUE(almost_sure_reach(pc.chain, pc.goal, pc.init)) << name;
    const double v = oracle::reach_probability(oracle::fsc_product(r.fsc, m));
    EXPECT_LT(1.0 - v, oracle::kTolerance) << name << " value " << v;
  }
}

TEST(Synth, IndexCoversNodesInOrder) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    const Pomdp& m = fixtures::model(name);
    EXPECT_EQ(r.index.iteration.at(m.observation_of(m.init())), r.fsc.init_node) << name;
    EXPECT_EQ(r.fsc.init_node + 1, r.fsc.num_nodes) << name;
    EXPECT_EQ(reachable_nodes(r.fsc, m).size(), r.fsc.num_nodes) << name;
    for (const auto& [z, i] : r.index.iteration) {
      EXPECT_LT(i, r.fsc.num_nodes);
      const auto zi = m.find_observation(z);
      ASSERT_TRUE(zi.has_value());
      EXPECT_FALSE(m.is_target_observation(*zi));
    }
  }
}

TEST(Synth, Deterministic) {
  for (const auto& name : {"maze", "obstacle-6"}) {
    const Pomdp& m = fixtures::model(name);
    const SynthResult a = synthesize(m);
    const SynthResult b = synthesize(m);
    EXPECT_EQ(dump_fsc(a.fsc), dump_fsc(b.fsc));
    EXPECT_EQ(a.index, b.index);
  }
}
