#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "dtfsc/dt.hpp"

namespace fixtures {

using dtfsc::DecisionTree;
using dtfsc::Predicate;

/// Every tree with exactly `size` nodes over `preds` and labels {0, 1}.
inline void enumerate_trees(std::size_t size, const std::vector<Predicate>& preds,
                            const std::function<void(const DecisionTree&)>& visit) {
  // Trees are built as nested structures and flattened into an arena.
  struct Shape {
    bool leaf;
    std::uint32_t label = 0;
    Predicate p;
    std::shared_ptr<Shape> t, f;
  };
  std::function<std::vector<std::shared_ptr<Shape>>(std::size_t)> all = [&](std::size_t n) {
    std::vector<std::shared_ptr<Shape>> out;
    if (n == 1) {
      for (std::uint32_t l : {0u, 1u}) out.push_back(std::make_shared<Shape>(Shape{true, l, {}, {}, {}}));
      return out;
    }
    for (std::size_t left = 1; left + 2 <= n; left += 2) {
      const std::size_t right = n - 1 - left;
      if (right % 2 == 0) continue;
      for (const auto& a : all(left))
        for (const auto& b : all(right))
          for (const auto& p : preds) out.push_back(std::make_shared<Shape>(Shape{false, 0, p, a, b}));
    }
    return out;
  };
  for (const auto& s : all(size)) {
    DecisionTree t;
    std::function<std::uint32_t(const Shape&)> flat = [&](const Shape& sh) {
      const auto id = static_cast<std::uint32_t>(t.nodes.size());
      t.nodes.emplace_back();
      if (sh.leaf) {
        t.nodes[id].label = sh.label;
      } else {
        const std::uint32_t a = flat(*sh.t);
        const std::uint32_t b = flat(*sh.f);
        t.nodes[id].leaf = false;
        t.nodes[id].predicate = sh.p;
        t.nodes[id].if_true = a;
        t.nodes[id].if_false = b;
      }
      return id;
    };
    t.root = flat(*s);
    visit(t);
  }
}


/// XOR over two boolean features: labels a ^ b.
inline dtfsc::Dataset xor_dataset() {
  dtfsc::Dataset ds;
  ds.layout = {dtfsc::FeatureSpec::boolean("a"), dtfsc::FeatureSpec::boolean("b")};
  ds.label_names = {"zero", "one"};
  for (dtfsc::Value a : {0, 1})
    for (dtfsc::Value b : {0, 1}) ds.rows.push_back({{a, b}, static_cast<std::uint32_t>(a ^ b)});
  return ds;
}

/// Every axis test on the XOR features.
inline std::vector<Predicate> xor_predicates() {
  std::vector<Predicate> preds;
  for (std::uint32_t f : {0u, 1u})
    for (dtfsc::Value v : {0, 1})
      for (auto test : {Predicate::Test::equals, Predicate::Test::less_equal}) preds.push_back({f, test, v});
  return preds;
}

}  // namespace fixtures
