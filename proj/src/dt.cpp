#include "dtfsc/dt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dtfsc/error.hpp"
#include "dtfsc/kernels.hpp"

namespace dtfsc {

std::uint32_t DecisionTree::evaluate(std::span<const Value> x) const {
  std::uint32_t n = root;
  while (!nodes[n].leaf) n = nodes[n].predicate.holds(x) ? nodes[n].if_true : nodes[n].if_false;
  return nodes[n].label;
}

std::size_t tree_size(const DecisionTree& t) { return t.nodes.size(); }

std::size_t tree_depth(const DecisionTree& t) {
  if (t.nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{t.root, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!t.nodes[n].leaf) {
      stack.emplace_back(t.nodes[n].if_true, d + 1);
      stack.emplace_back(t.nodes[n].if_false, d + 1);
    }
  }
  return best;
}

std::uint32_t evaluate(const DecisionTree& t, std::span<const FeatureSpec> layout,
                       std::span<const Value> x) {
  if (x.size() != layout.size())
    throw DomainError("input has " + std::to_string(x.size()) + " features, layout has " +
                      std::to_string(layout.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!layout[i].contains(x[i]))
      throw DomainError("feature '" + layout[i].name + "' value " + std::to_string(x[i]) +
                        " outside [" + std::to_string(layout[i].lo) + ", " +
                        std::to_string(layout[i].hi) + "]");
  return t.evaluate(x);
}

void validate(const DecisionTree& t, std::span<const FeatureSpec> layout, std::size_t num_labels) {
  if (t.nodes.empty()) throw ModelError("decision tree has no nodes");
  if (t.root >= t.nodes.size()) throw ModelError("decision tree root out of range");
  std::vector<bool> seen(t.nodes.size(), false);
  std::vector<std::uint32_t> stack{t.root};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    if (n >= t.nodes.size()) throw ModelError("decision tree child index out of range");
    if (seen[n]) throw ModelError("decision tree node " + std::to_string(n) + " has two parents");
    seen[n] = true;
    const auto& node = t.nodes[n];
    if (node.leaf) {
      if (node.label >= num_labels)
        throw ModelError("decision tree leaf label " + std::to_string(node.label) + " out of range");
      continue;
    }
    if (node.predicate.feature >= layout.size())
      throw ModelError("decision tree tests unknown feature " + std::to_string(node.predicate.feature));
    stack.push_back(node.if_true);
    stack.push_back(node.if_false);
  }
}

const char* to_string(Impurity i) { return i == Impurity::entropy ? "entropy" : "gini"; }

std::optional<std::pair<std::size_t, std::size_t>> find_contradiction(const Dataset& ds) {
  std::vector<std::size_t> order(ds.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.rows[a].x < ds.rows[b].x; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = ds.rows[order[i - 1]];
    const auto& b = ds.rows[order[i]];
    if (a.x == b.x && a.label != b.label) return std::pair{order[i - 1], order[i]};
  }
  return std::nullopt;
}

namespace {

std::string render(const std::vector<Value>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(x[i]);
  }
  return s;
}

kernels::Test to_kernel(Predicate::Test t) {
  return t == Predicate::Test::equals ? kernels::Test::equals : kernels::Test::less_equal;
}

class Learner {
 public:
  Learner(const Dataset& ds, const LearnOptions& opt) : ds_(ds), opt_(opt) {
    const std::size_t nf = ds.layout.size();
    for (const auto& r : ds.rows) labels_.push_back(r.label);
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    columns_.assign(nf, std::vector<std::int32_t>(ds.rows.size()));
    dense_.resize(ds.rows.size());
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      for (std::size_t f = 0; f < nf; ++f) columns_[f][i] = ds.rows[i].x[f];
      dense_[i] = static_cast<std::int32_t>(
          std::lower_bound(labels_.begin(), labels_.end(), ds.rows[i].label) - labels_.begin());
    }
  }

  DecisionTree run() {
    std::vector<std::uint32_t> all(ds_.rows.size());
    std::iota(all.begin(), all.end(), 0u);
    tree_.root = build(all);
    return std::move(tree_);
  }

 private:
  double impurity(std::span<const std::uint32_t> counts, std::size_t total) const {
    if (total == 0) return 0.0;
    double acc = 0.0;
    const double n = static_cast<double>(total);
    if (opt_.impurity == Impurity::entropy) {
      for (auto c : counts)
        if (c) {
          const double p = c / n;
          acc -= p * std::log2(p);
        }
      return acc;
    }
    for (auto c : counts) {
      const double p = c / n;
      acc += p * p;
    }
    return 1.0 - acc;
  }

  std::uint32_t build(const std::vector<std::uint32_t>& rows) {
    const std::size_t nl = labels_.size();
    std::vector<std::uint32_t> counts(nl, 0);
    for (auto r : rows) ++counts[dense_[r]];
    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    if (nonzero <= 1) {
      tree_.nodes[id].label = labels_[dense_[rows.front()]];
      return id;
    }

    const std::size_t n = rows.size();
    std::vector<std::int32_t> lab(n);
    for (std::size_t i = 0; i < n; ++i) lab[i] = dense_[rows[i]];
    const double parent = impurity(counts, n);

    std::vector<std::int32_t> col(n);
    std::vector<std::uint32_t> tcounts(nl), fcounts(nl);
    std::optional<Predicate> best;
    double best_gain = 0.0;
    std::vector<std::int32_t> best_col;
    std::vector<Value> values;

    auto consider = [&](const Predicate& p) {
      kernels::count_true_by_label(col, lab, to_kernel(p.test), p.value, tcounts);
      std::size_t nt = 0;
      for (std::size_t l = 0; l < nl; ++l) {
        fcounts[l] = counts[l] - tcounts[l];
        nt += tcounts[l];
      }
      if (nt == 0 || nt == n) return;
      const double w = static_cast<double>(nt) / static_cast<double>(n);
      const double gain = parent - w * impurity(tcounts, nt) - (1.0 - w) * impurity(fcounts, n - nt);
      if (!best || gain > best_gain + 1e-12) {
        best = p;
        best_gain = gain;
        best_col = col;
      }
    };

    for (std::uint32_t f = 0; f < ds_.layout.size(); ++f) {
      for (std::size_t i = 0; i < n; ++i) col[i] = columns_[f][rows[i]];
      values.assign(col.begin(), col.end());
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      if (values.size() < 2) continue;
      const auto& spec = ds_.layout[f];
      if (spec.is_boolean) {
        consider({f, Predicate::Test::equals, 1});
      } else if (spec.domain_size() <= 8) {
        for (auto v : values) consider({f, Predicate::Test::equals, v});
      } else {
        for (std::size_t k = 0; k + 1 < values.size(); ++k)
          consider({f, Predicate::Test::less_equal, values[k]});
      }
    }
    if (!best) throw DatasetError("no split separates rows at tree node " + std::to_string(id));

    std::vector<std::uint8_t> mask(n);
    kernels::predicate_mask(best_col, to_kernel(best->test), best->value, mask);
    std::vector<std::uint32_t> yes, no;
    for (std::size_t i = 0; i < n; ++i) (mask[i] ? yes : no).push_back(rows[i]);

    const auto t = build(yes);
    const auto e = build(no);
    auto& node = tree_.nodes[id];
    node.leaf = false;
    node.predicate = *best;
    node.if_true = t;
    node.if_false = e;
    return id;
  }

  const Dataset& ds_;
  LearnOptions opt_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::vector<std::int32_t>> columns_;
  std::vector<std::int32_t> dense_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree learn(const Dataset& ds, const LearnOptions& options) {
  if (ds.rows.empty()) throw DatasetError("empty dataset");
  validate_features(ds.layout);
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const auto& r = ds.rows[i];
    if (r.x.size() != ds.layout.size())
      throw DatasetError("row " + std::to_string(i) + " has " + std::to_string(r.x.size()) +
                         " features, layout has " + std::to_string(ds.layout.size()));
    for (std::size_t f = 0; f < r.x.size(); ++f)
      if (!ds.layout[f].contains(r.x[f]))
        throw DatasetError("row " + std::to_string(i) + ": feature '" + ds.layout[f].name +
                           "' value " + std::to_string(r.x[f]) + " outside its domain");
    if (!ds.label_names.empty() && r.label >= ds.label_names.size())
      throw DatasetError("row " + std::to_string(i) + ": label " + std::to_string(r.label) +
                         " has no name");
  }
  if (auto c = find_contradiction(ds)) {
    const auto& a = ds.rows[c->first];
    const auto& b = ds.rows[c->second];
    auto name = [&](std::uint32_t l) {
      return l < ds.label_names.size() ? ds.label_names[l] : std::to_string(l);
    };
    throw DatasetError("contradictory rows " + std::to_string(c->first) + " and " +
                       std::to_string(c->second) + ": input (" + render(a.x) + ") labelled '" +
                       name(a.label) + "' and '" + name(b.label) + "'");
  }
  return Learner(ds, options).run();
}

}  // namespace dtfsc
