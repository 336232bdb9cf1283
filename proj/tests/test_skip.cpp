#include <gtest/gtest.h>

#include "dtfsc/bench.hpp"
#include "dtfsc/error.hpp"
#include "dtfsc/skip.hpp"
#include "support/fixtures.hpp"

using namespace dtfsc;

namespace {

/// Three nodes over one integer feature. Observation {1} is won at node 0,
/// {2} at node 1; node 2 holds a long jump back to node 0 on {1}.
struct ChainExample {
  Fsc fsc{3, 2, {"a"}};
  IterationIndex idx;

  ChainExample() {
    fsc.set_gamma(0, {1}, Choice::act(0));
    fsc.set_delta(0, {1}, {3}, 0);
    fsc.set_gamma(1, {2}, Choice::act(0));
    fsc.set_delta(1, {2}, {1}, 0);
    fsc.set_delta(1, {2}, {3}, 1);
    fsc.set_gamma(2, {0}, Choice::act(0));
    fsc.set_delta(2, {0}, {0}, 2);
    fsc.set_delta(2, {0}, {1}, 0);
    fsc.set_delta(2, {0}, {2}, 1);
    idx.iteration[{1}] = 0;
    idx.iteration[{2}] = 1;
  }
};

/// Changes the first reachable action choice of the skip controller.
SkipFsc flip_action(const SkipFsc& sf, const Pomdp& m) {
  SkipFsc out = sf;
  const Observation& z = m.observation_of(m.init());
  const Choice* ch = out.find_gamma(out.init_node, z);
  const auto a = static_cast<ActionId>((ch->id + 1) % m.num_actions());
  out.set_gamma(out.init_node, z, Choice::act(a));
  return out;
}

/// Reroutes the first delta entry leaving the initial pair to a node that
/// cannot act the same way on the next observation.
std::optional<SkipFsc> reroute(const SkipFsc& sf, const Fsc& fsc, const Pomdp& m) {
  const Observation& z = m.observation_of(m.init());
  const ActionId a = sf.find_gamma(sf.init_node, z)->id;
  for (const auto& o : *m.transition(m.init(), a)) {
    const Observation& next = m.observation_of(o.state);
    if (m.is_target(o.state)) continue;
    const NodeId to = *sf.find_delta(sf.init_node, z, next);
    const Choice* want = fsc.find_gamma(*fsc.find_delta(fsc.init_node, z, next), next);
    for (NodeId other = 0; other < sf.num_nodes; ++other) {
      if (other == to) continue;
      const Choice* got = sf.find_gamma(other, next);
      if (got && !got->is_skip() && want && *got == *want) continue;
      if (got && got->is_skip()) continue;
      SkipFsc out = sf;
      out.set_delta(sf.init_node, z, next, other);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

TEST(Skip, ChainExampleConversion) {
  ChainExample ex;
  validate(ex.fsc);
  verify_chain_property(ex.fsc, ex.idx);
  const SkipFsc sf = to_skip_fsc(ex.fsc, ex.idx);
  validate(sf);
  EXPECT_EQ(sf.find_delta(2, {0}, {1}), std::optional<NodeId>(1));
  ASSERT_NE(sf.find_gamma(1, {1}), nullptr);
  EXPECT_TRUE(sf.find_gamma(1, {1})->is_skip());
  EXPECT_EQ(sf.find_delta(1, {1}, {1}), std::optional<NodeId>(0));
  EXPECT_EQ(sf.find_delta(2, {0}, {2}), std::optional<NodeId>(1));
  EXPECT_EQ(sf.find_delta(1, {2}, {1}), std::optional<NodeId>(0));
  EXPECT_EQ(sf.gamma_size(), ex.fsc.gamma_size() + 1);
  EXPECT_EQ(sf.delta_size(), ex.fsc.delta_size() + 1);
}

TEST(Skip, ChainViolationWitness) {
  ChainExample ex;
  ex.fsc.set_delta(2, {0}, {1}, 2);
  const auto w = find_chain_violation(ex.fsc, ex.idx);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->node, 2u);
  EXPECT_EQ(w->won, Observation{1});
  EXPECT_EQ(w->from, Observation{0});
  EXPECT_EQ(w->found, std::optional<NodeId>(2));
  EXPECT_THROW(verify_chain_property(ex.fsc, ex.idx), ChainViolationError);
  EXPECT_THROW(to_skip_fsc(ex.fsc, ex.idx), ChainViolationError);
}

TEST(Skip, MissingEntryIsAViolation) {
  ChainExample ex;
  ASSERT_TRUE(ex.fsc.erase_delta(2, {0}, {1}));
  const auto w = find_chain_violation(ex.fsc, ex.idx);
  ASSERT_TRUE(w.has_value());
  EXPECT_FALSE(w->found.has_value());
}

TEST(Skip, OverwriteConflictRaises) {
  ChainExample ex;
  ex.fsc.set_gamma(1, {1}, Choice::act(0));
  ex.fsc.set_delta(1, {1}, {1}, 0);
  ex.fsc.set_delta(1, {1}, {2}, 1);
  ex.fsc.set_delta(1, {1}, {3}, 1);
  EXPECT_THROW(to_skip_fsc(ex.fsc, ex.idx), ChainViolationError);
}

TEST(Skip, ValidateRequiresDescent) {
  SkipFsc sf(2, 1, {"a"});
  sf.set_gamma(0, {0}, Choice::skip());
  sf.set_delta(0, {0}, {0}, 0);
  EXPECT_THROW(validate(sf), ModelError);
  SkipFsc ok(2, 1, {"a"});
  ok.set_gamma(1, {0}, Choice::skip());
  ok.set_delta(1, {0}, {0}, 0);
  validate(ok);
}

TEST(Skip, EmbedIsEquivalent) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    EXPECT_TRUE(check_equiv(r.fsc, embed(r.fsc), fixtures::model(name)).equivalent) << name;
  }
}

TEST(Skip, ChainPropertyExhaustive) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    std::size_t checked = 0;
    for (const auto& [z, i] : r.index.iteration) {
      for (NodeId j = i + 1; j < r.fsc.num_nodes; ++j) {
        for (const auto& [zc, ch] : r.fsc.gamma[j]) {
          EXPECT_EQ(r.fsc.find_delta(j, zc, z), std::optional<NodeId>(i)) << name;
          ++checked;
        }
      }
    }
    EXPECT_FALSE(find_chain_violation(r.fsc, r.index).has_value()) << name;
    if (r.fsc.num_nodes > 1) {
      EXPECT_GT(checked, 0u) << name;
    }
  }
}

TEST(Skip, ConversionIsEquivalent) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    const Pomdp& m = fixtures::model(name);
    const SkipFsc sf = to_skip_fsc(r.fsc, r.index);
    validate(sf);
    const EquivVerdict v = check_equiv(r.fsc, sf, m);
    EXPECT_TRUE(v.equivalent) << name << "\n" << v.to_string(m);
  }
}

TEST(Skip, FlippedActionGivesCounterexample) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    const Pomdp& m = fixtures::model(name);
    const SkipFsc mutant = flip_action(to_skip_fsc(r.fsc, r.index), m);
    const EquivVerdict v = check_equiv(r.fsc, mutant, m);
    EXPECT_FALSE(v.equivalent) << name;
    EXPECT_TRUE(v.prefix.empty()) << name;
    EXPECT_EQ(v.last, m.observation_of(m.init()));
    EXPECT_NE(v.fsc_choice, v.skip_choice);
    EXPECT_FALSE(v.to_string(m).empty());
  }
}

TEST(Skip, ReroutedTransitionGivesCounterexample) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    const Pomdp& m = fixtures::model(name);
    const auto mutant = reroute(to_skip_fsc(r.fsc, r.index), r.fsc, m);
    ASSERT_TRUE(mutant.has_value()) << name;
    const EquivVerdict v = check_equiv(r.fsc, *mutant, m);
    EXPECT_FALSE(v.equivalent) << name;
    ASSERT_EQ(v.prefix.size(), 1u) << name;
    EXPECT_EQ(v.prefix[0].z, m.observation_of(m.init()));
  }
}

TEST(Skip, StepResolvesSkipsFirst) {
  ChainExample ex;
  const SkipFsc sf = to_skip_fsc(ex.fsc, ex.idx);
  PomdpBuilder b({FeatureSpec::integer("x", 0, 3)}, {"a"});
  const StateId s0 = b.add_state({0});
  const StateId s1 = b.add_state({1});
  const StateId s2 = b.add_state({2});
  const StateId goal = b.add_state({3});
  b.set_transition(s0, 0, {{s1, 0.5}, {s2, 0.5}});
  b.set_transition(s1, 0, {{goal, 1.0}});
  b.set_transition(s2, 0, {{s1, 0.5}, {goal, 0.5}});
  b.set_transition(goal, 0, {{goal, 1.0}});
  b.set_init(s0);
  b.add_target(goal);
  const Pomdp m = std::move(b).build();
  const SkipStepResult first = skip_step(sf, m, 2, s0, s1);
  EXPECT_EQ(first.outcome.next_node, 1u);
  EXPECT_TRUE(first.trace.empty());
  const SkipStepResult second = skip_step(sf, m, 1, s1, goal);
  EXPECT_EQ(second.trace, std::vector<NodeId>{1});
  EXPECT_EQ(second.outcome.next_node, 0u);
  EXPECT_TRUE(check_equiv(ex.fsc, sf, m).equivalent);
}
