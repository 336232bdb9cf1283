#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "dtfsc/dt.hpp"
#include "dtfsc/kernels.hpp"

using namespace dtfsc;
namespace k = dtfsc::kernels;

namespace {

struct IsaGuard {
  ~IsaGuard() { k::reset_isa(); }
};

std::vector<k::Isa> supported() {
  std::vector<k::Isa> out;
  for (k::Isa isa : {k::Isa::scalar, k::Isa::avx2, k::Isa::neon})
    if (k::isa_supported(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST(Kernels, ScalarAlwaysSupported) {
  EXPECT_TRUE(k::isa_supported(k::Isa::scalar));
  EXPECT_STREQ(k::to_string(k::Isa::avx2), "avx2");
}

TEST(Kernels, ForcingUnsupportedIsaThrows) {
  IsaGuard guard;
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon})
    if (!k::isa_supported(isa)) {
      EXPECT_THROW(k::force_isa(isa), std::invalid_argument);
    }
  k::force_isa(k::Isa::scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::scalar);
}

TEST(Kernels, VariantsMatchScalarReference) {
  IsaGuard guard;
  std::mt19937_64 gen(21);
  for (int round = 0; round < 400; ++round) {
    const std::size_t n = static_cast<std::size_t>(round % 67) + (round % 5 == 0 ? 500 : 0);
    std::vector<std::int32_t> column(n), labels(n);
    std::uniform_int_distribution<std::int32_t> val(-5, 20), lab(-1, 6);
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = val(gen);
      labels[i] = lab(gen);
    }
    const std::int32_t v = val(gen);
    for (k::Test test : {k::Test::equals, k::Test::less_equal}) {
      std::vector<std::uint32_t> ref(6);
      std::vector<std::uint8_t> ref_mask(n);
      k::scalar::count_true_by_label(column, labels, test, v, ref);
      k::scalar::predicate_mask(column, test, v, ref_mask);
      for (k::Isa isa : supported()) {
        k::force_isa(isa);
        std::vector<std::uint32_t> out(6, 99);
        std::vector<std::uint8_t> mask(n, 7);
        k::count_true_by_label(column, labels, test, v, out);
        k::predicate_mask(column, test, v, mask);
        EXPECT_EQ(out, ref) << k::to_string(isa) << " n=" << n;
        EXPECT_EQ(mask, ref_mask) << k::to_string(isa) << " n=" << n;
      }
    }
  }
}

TEST(Kernels, CountsAgainstDirectLoop) {
  const std::vector<std::int32_t> column{1, 2, 3, 2, 1, 2};
  const std::vector<std::int32_t> labels{0, 1, 1, 0, 2, 1};
  std::vector<std::uint32_t> out(3);
  k::scalar::count_true_by_label(column, labels, k::Test::equals, 2, out);
  EXPECT_EQ(out, (std::vector<std::uint32_t>{1, 2, 0}));
  k::scalar::count_true_by_label(column, labels, k::Test::less_equal, 1, out);
  EXPECT_EQ(out, (std::vector<std::uint32_t>{1, 0, 1}));
}

TEST(Kernels, LearnedTreesIndependentOfIsa) {
  IsaGuard guard;
  std::mt19937_64 gen(5);
  Dataset ds;
  ds.layout = {FeatureSpec::integer("a", 0, 30), FeatureSpec::boolean("b"), FeatureSpec::integer("c", 0, 5)};
  ds.label_names = {"x", "y", "z"};
  std::set<std::vector<Value>> seen;
  for (int i = 0; i < 300; ++i) {
    std::vector<Value> x{std::uniform_int_distribution<Value>(0, 30)(gen),
                         std::uniform_int_distribution<Value>(0, 1)(gen),
                         std::uniform_int_distribution<Value>(0, 5)(gen)};
    if (!seen.insert(x).second) continue;
    ds.rows.push_back({x, static_cast<std::uint32_t>((x[0] / 7 + x[1] + x[2]) % 3)});
  }
  k::force_isa(k::Isa::scalar);
  const DecisionTree ref = learn(ds);
  for (k::Isa isa : supported()) {
    k::force_isa(isa);
    EXPECT_EQ(learn(ds), ref) << k::to_string(isa);
  }
}
