#include <gtest/gtest.h>

#include "dtfsc/bench.hpp"
#include "dtfsc/dot.hpp"
#include "dtfsc/report.hpp"
#include "dtfsc/skip.hpp"
#include "support/fixtures.hpp"
#include "support/table_sizes.hpp"

using namespace dtfsc;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

Pomdp single_state_target() {
  PomdpBuilder b({FeatureSpec::boolean("g")}, {"stay"});
  const StateId s = b.add_state({1});
  b.set_transition(s, 0, {{s, 1.0}});
  b.add_target(s);
  return std::move(b).build();
}

}  // namespace

TEST(Report, TrivialControllerHasUnitRatios) {
  const Pomdp m = single_state_target();
  const SynthResult r = synthesize(m);
  const MetricsReport rep = make_report("trivial", r.fsc, build_dtfsc(r.fsc, m), m);
  EXPECT_EQ(rep.fsc_nodes, 1u);
  EXPECT_EQ(format_ratio(rep.policy_ratio()), "1.00");
  EXPECT_EQ(format_ratio(rep.trans_ratio()), "1.00");
  EXPECT_EQ(csv_row(rep), "trivial,1,1,1,1.00,1,1,1.00,plain");
}

TEST(Report, TableSizeControllerRatios) {
  const auto fx = fixtures::table_sizes_fixture();
  validate(fx.fsc);
  validate_against(fx.fsc, fx.model);
  const DtFsc dt = build_dtfsc(fx.fsc, fx.model);
  EXPECT_TRUE(check_faithful(fx.fsc, dt, fx.model).equal);
  const MetricsReport rep = make_report("obstacle", fx.fsc, dt, fx.model);
  EXPECT_EQ(rep.fsc_nodes, 7u);
  EXPECT_EQ(rep.policy_rows, 22u);
  EXPECT_EQ(rep.policy_dt_nodes, 9u);
  EXPECT_EQ(rep.trans_rows, 24u);
  EXPECT_EQ(rep.trans_dt_nodes, 9u);
  EXPECT_EQ(format_ratio(rep.policy_ratio()), "2.44");
  EXPECT_EQ(format_ratio(rep.trans_ratio()), "2.67");
}

TEST(Report, CsvFormat) {
  EXPECT_EQ(csv_header(),
            "benchmark,fsc_nodes,policy_rows,policy_dt_nodes,policy_ratio,trans_rows,trans_dt_nodes,trans_ratio,variant");
  MetricsReport r;
  r.benchmark = "a,b";
  r.variant = DtFsc::Variant::skip;
  EXPECT_EQ(csv_row(r), "\"a,b\",0,0,0,0.00,0,0,0.00,skip");
  EXPECT_EQ(format_ratio(2.0 / 3.0), "0.67");
}

TEST(Report, SkipRowsKeepPlainTableSizes) {
  const auto& r = fixtures::synthesized("maze");
  const Pomdp& m = fixtures::model("maze");
  const SkipFsc sf = to_skip_fsc(r.fsc, r.index);
  const MetricsReport plain = make_report("maze", r.fsc, build_dtfsc(r.fsc, m), m);
  const MetricsReport skip = make_report("maze", r.fsc, build_dtfsc(sf, m), m);
  EXPECT_EQ(plain.policy_rows, skip.policy_rows);
  EXPECT_EQ(plain.trans_rows, skip.trans_rows);
  EXPECT_EQ(skip.variant, DtFsc::Variant::skip);
}

TEST(Dot, SingleLeafTree) {
  const std::vector<FeatureSpec> layout{FeatureSpec::boolean("a")};
  const std::string dot = tree_dot(DecisionTree::single_leaf(0), layout, {"go"});
  EXPECT_EQ(count(dot, "shape="), 1u);
  EXPECT_EQ(count(dot, "->"), 0u);
  EXPECT_NE(dot.find("label=\"go\""), std::string::npos);
}

TEST(Dot, MazeReferenceShowsTwoNodesAndFourTrees) {
  const DtFsc dt = build_dtfsc(maze_reference_fsc(), gen_maze());
  const std::string dot = dtfsc_dot(dt);
  EXPECT_EQ(count(dot, "shape=circle"), 2u);
  EXPECT_EQ(count(dot, "subgraph cluster_"), 4u);
  EXPECT_NE(dot.find("label=\"CanGoLeft'=1\""), std::string::npos);
}

TEST(Dot, Deterministic) {
  for (const auto& name : fixtures::solvable_benchmarks()) {
    const auto& r = fixtures::synthesized(name);
    const Pomdp& m = fixtures::model(name);
    const SkipFsc sf = to_skip_fsc(r.fsc, r.index);
    EXPECT_EQ(controller_dot(r.fsc), controller_dot(r.fsc));
    EXPECT_EQ(controller_dot(sf), controller_dot(sf));
    EXPECT_EQ(dtfsc_dot(build_dtfsc(sf, m)), dtfsc_dot(build_dtfsc(sf, m))) << name;
  }
}

TEST(Dot, SkipEdgesAreDashed) {
  const auto& r = fixtures::synthesized("maze");
  const SkipFsc sf = to_skip_fsc(r.fsc, r.index);
  bool has_skip = false;
  for (const auto& row : sf.gamma)
    for (const auto& [z, ch] : row) has_skip |= ch.is_skip();
  EXPECT_EQ(controller_dot(sf).find("dashed") != std::string::npos, has_skip);
  EXPECT_EQ(controller_dot(r.fsc).find("dashed"), std::string::npos);
}
