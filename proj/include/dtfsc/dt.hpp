#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "dtfsc/pomdp.hpp"

namespace dtfsc {

/// Axis-aligned test on one feature: x[feature] == value or x[feature] <= value.
struct Predicate {
  enum class Test : std::uint8_t { equals, less_equal };

  std::uint32_t feature = 0;
  Test test = Test::equals;
  Value value = 0;

  bool holds(std::span<const Value> x) const {
    return test == Test::equals ? x[feature] == value : x[feature] <= value;
  }

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Binary decision tree stored as an arena. Inner nodes branch to `if_true`
/// when the predicate holds; leaves carry a label id.
struct DecisionTree {
  struct Node {
    bool leaf = true;
    Predicate predicate;
    std::uint32_t if_true = 0;
    std::uint32_t if_false = 0;
    std::uint32_t label = 0;

    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;
  std::uint32_t root = 0;

  static DecisionTree single_leaf(std::uint32_t label) {
    DecisionTree t;
    t.nodes.emplace_back().label = label;
    return t;
  }

  /// Follows predicates from the root; no domain checks.
  std::uint32_t evaluate(std::span<const Value> x) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

/// Total number of nodes, inner and leaf.
std::size_t tree_size(const DecisionTree& t);
std::size_t tree_depth(const DecisionTree& t);

/// Evaluates after checking `x` against `layout`. Throws DomainError.
std::uint32_t evaluate(const DecisionTree& t, std::span<const FeatureSpec> layout,
                       std::span<const Value> x);

/// Structural checks: arena indices in range, acyclic, features inside the
/// layout, labels below `num_labels`. Throws ModelError.
void validate(const DecisionTree& t, std::span<const FeatureSpec> layout, std::size_t num_labels);

struct Dataset {
  struct Row {
    std::vector<Value> x;
    std::uint32_t label = 0;
  };

  std::vector<FeatureSpec> layout;
  std::vector<Row> rows;
  std::vector<std::string> label_names;
};

enum class Impurity : std::uint8_t { entropy, gini };

const char* to_string(Impurity i);

struct LearnOptions {
  Impurity impurity = Impurity::entropy;
};

/// Greedy top-down induction that reproduces the dataset exactly.
///
/// Candidate tests per feature: equals(v) for every observed v when the
/// domain has at most 8 values (boolean features only test equals(1)), and
/// less_equal(v) for every observed v but the largest otherwise. The best
/// impurity reduction wins; ties go to the lower feature index, then the
/// smaller value, then equals before less_equal. A split with zero gain is
/// still taken when both sides are non-empty.
///
/// Throws DatasetError for an empty dataset, rows outside the layout or
/// contradictory rows (same inputs, different labels).
DecisionTree learn(const Dataset& ds, const LearnOptions& options = {});

/// Indices of a pair of rows with identical inputs and different labels.
std::optional<std::pair<std::size_t, std::size_t>> find_contradiction(const Dataset& ds);

}  // namespace dtfsc
