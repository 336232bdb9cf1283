#include <gtest/gtest.h>

#include <set>

#include "dtfsc/bench.hpp"
#include "dtfsc/error.hpp"
#include "dtfsc/fsc.hpp"
#include "support/oracle.hpp"

using namespace dtfsc;

namespace {

enum : ActionId { down, left, right, up, init };

const Observation kPre{0, 0, 0, 0, 0, 0, 0};
const Observation kLr{0, 1, 1, 0, 0, 1, 0};
const Observation kDl{1, 1, 0, 0, 0, 1, 0};
const Observation kUd{1, 0, 0, 1, 0, 1, 0};
const Observation kDr{1, 0, 1, 0, 0, 1, 0};
const Observation kDlr{1, 1, 1, 0, 0, 1, 0};
const Observation kCheese{0, 0, 0, 0, 0, 1, 1};

/// Line controller that never changes node.
Fsc line_fsc() {
  Fsc f(1, 0, {"left", "right"});
  for (Value p : {0, 1}) {
    f.set_gamma(0, {p}, Choice::act(1));
    for (Value q : {0, 1, 2}) f.set_delta(0, {p}, {q}, 0);
  }
  return f;
}

/// (z, z') pairs realisable from states carrying z under action a.
std::set<std::pair<Observation, Observation>> realisable(const Pomdp& m, const Observation& z, ActionId a) {
  std::set<std::pair<Observation, Observation>> out;
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.observation_of(s) != z) continue;
    for (const auto& o : *m.transition(s, a)) out.insert({z, m.observation_of(o.state)});
  }
  return out;
}

}  // namespace

TEST(MazeModel, StateObservationsMatchLayout) {
  const Pomdp m = gen_maze();
  ASSERT_EQ(m.num_states(), 15u);
  EXPECT_EQ(m.observation_of(0), kPre);
  EXPECT_EQ(m.observation_of(1), kDr);   // (0, 0)
  EXPECT_EQ(m.observation_of(3), kDlr);  // (2, 0)
  EXPECT_EQ(m.observation_of(5), kDl);   // (4, 0)
  EXPECT_EQ(m.observation_of(11), kUd);  // (4, 2)
  EXPECT_EQ(m.observation_of(14), kCheese);
  EXPECT_TRUE(m.is_target(14));
}

TEST(Fsc, ReferenceMazeControllerGoesUpThenLeftToCheese) {
  const Pomdp m = gen_maze();
  const Fsc f = maze_reference_fsc();
  validate(f);
  validate_against(f, m);
  NodeId n = 0;
  StateId s = 10;  // (4, 1), corridor with walls left and right
  std::vector<ActionId> actions;
  Rng rng(1);
  while (!m.is_target(s) && actions.size() < 20) {
    const StepOutcome o = fsc_step(f, m, n, s, rng);
    actions.push_back(o.action);
    n = o.next_node;
    s = o.next_state;
  }
  EXPECT_EQ(s, 14u);
  EXPECT_EQ(actions, (std::vector<ActionId>{up, left, left, down, down, down}));
}

TEST(Fsc, StepWithInjectedSuccessor) {
  const Pomdp m = gen_maze();
  const Fsc f = maze_reference_fsc();
  const StepOutcome o = fsc_step(f, m, 0, 0, 3);  // INIT places the mouse at (2, 0)
  EXPECT_EQ(o.action, init);
  EXPECT_EQ(o.next_state, 3u);
  EXPECT_EQ(o.next_observation, kDlr);
  EXPECT_EQ(o.next_node, 1u);
  EXPECT_THROW(fsc_step(f, m, 0, 3, 4), Error);  // not a successor
}

TEST(Fsc, UndefinedGammaAndDelta) {
  const Pomdp m = gen_line();
  Fsc f(1, 0, {"left", "right"});
  EXPECT_THROW(fsc_step(f, m, 0, 0, 1), UndefinedGammaError);
  f.set_gamma(0, {0}, Choice::act(1));
  EXPECT_THROW(fsc_step(f, m, 0, 0, 1), UndefinedDeltaError);
}

TEST(Fsc, ValidateRejectsBadTables) {
  Fsc f = line_fsc();
  validate(f);
  Fsc bad_node = f;
  bad_node.set_delta(0, {0}, {1}, 3);
  EXPECT_THROW(validate(bad_node), ModelError);
  Fsc bad_init = f;
  bad_init.init_node = 2;
  EXPECT_THROW(validate(bad_init), ModelError);
  Fsc skip = f;
  skip.set_gamma(0, {0}, Choice::skip());
  EXPECT_THROW(validate(skip), ModelError);
  Fsc mixed = f;
  mixed.mixed.push_back({{{0, 0.5}, {1, 0.4}}});
  mixed.set_gamma(0, {0}, Choice::mixed(0));
  EXPECT_THROW(validate(mixed), ModelError);
  Fsc mixed_index = f;
  mixed_index.set_gamma(0, {0}, Choice::mixed(4));
  EXPECT_THROW(validate(mixed_index), ModelError);
}

TEST(Fsc, ValidateAgainstModel) {
  const Pomdp m = gen_line();
  Fsc f = line_fsc();
  validate_against(f, m);
  Fsc renamed = f;
  renamed.actions = {"west", "east"};
  EXPECT_THROW(validate_against(renamed, m), ModelError);
  const Pomdp maze = gen_maze();
  Fsc ref = maze_reference_fsc();
  ref.set_gamma(0, kUd, Choice::act(left));
  EXPECT_THROW(validate_against(ref, maze), ModelError);
}

TEST(Fsc, ExtractTablesKeepsRealisablePairsOnly) {
  const Pomdp m = gen_maze();
  const Fsc f = maze_reference_fsc();
  const auto tables = extract_tables(f, m);
  ASSERT_EQ(tables.size(), 2u);
  for (const NodeTables& t : tables) {
    EXPECT_EQ(t.action_rows.size(), f.gamma[t.node].size());
    std::set<std::pair<Observation, Observation>> expected;
    for (const auto& [z, ch] : f.gamma[t.node])
      for (const auto& p : realisable(m, z, ch.id)) expected.insert(p);
    std::set<std::pair<Observation, Observation>> got;
    for (const auto& r : t.transition_rows) {
      got.insert({r.z, r.next});
      EXPECT_EQ(f.find_delta(t.node, r.z, r.next), std::optional<NodeId>(r.to));
    }
    EXPECT_EQ(got, expected);
    EXPECT_EQ(t.transition_rows.size(), expected.size());
    EXPECT_TRUE(std::is_sorted(t.action_rows.begin(), t.action_rows.end(),
                               [](const auto& a, const auto& b) { return a.z < b.z; }));
  }
}

TEST(Fsc, TablesRoundTrip) {
  const Pomdp m = gen_maze();
  const Fsc f = maze_reference_fsc();
  const auto tables = extract_tables(f, m);
  const Fsc back = fsc_from_tables(tables, f.num_nodes, f.init_node, f.actions);
  EXPECT_EQ(extract_tables(back, m), tables);
}

TEST(Fsc, ClosureViolationDetected) {
  const Pomdp m = gen_maze();
  Fsc f = maze_reference_fsc();
  ASSERT_TRUE(f.erase_delta(0, kLr, kDlr));
  EXPECT_THROW(extract_tables(f, m), ClosureError);
}

TEST(Fsc, ReachableNodesOfLine) {
  const Pomdp m = gen_line();
  Fsc f = line_fsc();
  f.resize(3);
  EXPECT_EQ(reachable_nodes(f, m), std::vector<NodeId>{0});
}

TEST(Fsc, ProductChainAgreesWithOracle) {
  const Pomdp m = gen_maze();
  const Fsc f = maze_reference_fsc();
  const ProductChain pc = product_chain(f, m);
  const bool graph = almost_sure_reach(pc.chain, pc.goal, pc.init);
  const double v = oracle::reach_probability(oracle::fsc_product(f, m));
  EXPECT_EQ(graph, 1.0 - v < oracle::kTolerance);
  // Placement on the left column leads the reference controller into a trap.
  EXPECT_FALSE(graph);
  EXPECT_GT(v, 0.5);
}

TEST(Fsc, MixedChoiceSamplesItsSupport) {
  const Pomdp m = gen_line();
  Fsc f = line_fsc();
  f.mixed.push_back({{{0, 0.25}, {1, 0.75}}});
  f.set_gamma(0, {0}, Choice::mixed(0));
  validate(f);
  EXPECT_EQ(f.choice_name(Choice::mixed(0)), "0.250:left, 0.750:right");
  EXPECT_EQ(fsc_step(f, m, 0, 0, 0, ActionId{0}).action, 0u);
  EXPECT_EQ(fsc_step(f, m, 0, 0, 1, ActionId{1}).action, 1u);
  Rng rng(5);
  std::size_t lefts = 0;
  for (int i = 0; i < 4000; ++i) lefts += fsc_step(f, m, 0, 0, rng).action == 0;
  EXPECT_NEAR(static_cast<double>(lefts) / 4000.0, 0.25, 0.03);
}

TEST(Fsc, SimulationIsSeedDeterministic) {
  const Pomdp m = gen_maze();
  const Fsc f = maze_reference_fsc();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    const EpisodeResult x = simulate_episode(f, m, a);
    const EpisodeResult y = simulate_episode(f, m, b);
    EXPECT_EQ(x.status, y.status);
    EXPECT_EQ(x.steps, y.steps);
    EXPECT_NE(x.status, EpisodeStatus::undefined);
  }
}

TEST(Fsc, EpisodeStatusNames) {
  EXPECT_STREQ(to_string(EpisodeStatus::target), "target");
  EXPECT_STREQ(to_string(EpisodeStatus::trapped), "trapped");
}
