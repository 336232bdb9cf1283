#include "dtfsc/dot.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace dtfsc {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string predicate_label(const Predicate& p, std::span<const FeatureSpec> layout) {
  const std::string name = p.feature < layout.size() ? layout[p.feature].name : "x" + std::to_string(p.feature);
  return name + (p.test == Predicate::Test::equals ? "=" : "<=") + std::to_string(p.value);
}

void emit_tree(std::ostream& os, const DecisionTree& t, std::span<const FeatureSpec> layout,
               const std::vector<std::string>& labels, const std::string& prefix, const std::string& indent) {
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    const std::string id = prefix + std::to_string(i);
    if (n.leaf) {
      const std::string name = n.label < labels.size() ? labels[n.label] : "#" + std::to_string(n.label);
      os << indent << id << " [shape=ellipse, label=" << quote(name) << "];\n";
    } else {
      os << indent << id << " [shape=box, label=" << quote(predicate_label(n.predicate, layout)) << "];\n";
    }
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    if (n.leaf) continue;
    os << indent << prefix << i << " -> " << prefix << n.if_true << " [label=\"true\"];\n";
    os << indent << prefix << i << " -> " << prefix << n.if_false << " [label=\"false\"];\n";
  }
}

std::string body_dot(const ControllerBody& c, bool skip) {
  // (from, to, dashed) -> number of delta entries
  std::map<std::tuple<NodeId, NodeId, bool>, std::size_t> edges;
  for (NodeId n = 0; n < c.delta.size(); ++n)
    for (const auto& [z, row] : c.delta[n]) {
      const Choice* g = c.find_gamma(n, z);
      for (const auto& [zn, to] : row) {
        const bool dashed = skip && g && g->is_skip() && zn == z;
        ++edges[{n, to, dashed}];
      }
    }
  std::ostringstream os;
  os << "digraph controller {\n  rankdir=LR;\n  start [shape=point];\n";
  for (NodeId n = 0; n < c.num_nodes; ++n) os << "  n" << n << " [shape=circle, label=\"n" << n << "\"];\n";
  os << "  start -> n" << c.init_node << ";\n";
  for (const auto& [key, count] : edges) {
    const auto& [from, to, dashed] = key;
    os << "  n" << from << " -> n" << to << " [label=\"" << count << "\"" << (dashed ? ", style=dashed" : "")
       << "];\n";
  }
  os << "}\n";
  return os.str();
}

void collect_leaves(const DecisionTree& t, std::set<std::uint32_t>& out) {
  for (const auto& n : t.nodes)
    if (n.leaf) out.insert(n.label);
}

}  // namespace

std::string tree_dot(const DecisionTree& tree, std::span<const FeatureSpec> layout,
                     const std::vector<std::string>& label_names, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph " << quote(graph_name) << " {\n";
  emit_tree(os, tree, layout, label_names, "t", "  ");
  os << "}\n";
  return os.str();
}

std::string controller_dot(const Fsc& fsc) { return body_dot(fsc, false); }
std::string controller_dot(const SkipFsc& sf) { return body_dot(sf, true); }

std::string dtfsc_dot(const DtFsc& dt) {
  std::vector<std::string> action_names, node_names;
  for (std::uint32_t l = 0; l < dt.action_labels.size(); ++l) action_names.push_back(dt.label_name(l));
  for (std::size_t n = 0; n < dt.num_nodes; ++n) node_names.push_back("n" + std::to_string(n));
  const auto tl = transition_layout(dt.features);

  std::ostringstream os;
  os << "digraph dtfsc {\n  compound=true;\n  start [shape=point];\n";
  for (const auto& nt : dt.nodes) os << "  n" << nt.node << " [shape=circle, label=\"n" << nt.node << "\"];\n";
  os << "  start -> n" << dt.init_node << ";\n";
  for (const auto& nt : dt.nodes) {
    std::set<std::uint32_t> targets;
    collect_leaves(nt.transition_tree, targets);
    for (auto to : targets)
      os << "  n" << nt.node << " -> n" << to << " [label=\"T" << nt.node << "\"];\n";
    std::set<std::uint32_t> labels;
    collect_leaves(nt.action_tree, labels);
    const bool skips = std::any_of(labels.begin(), labels.end(), [&](std::uint32_t l) {
      return l < dt.action_labels.size() && dt.action_labels[l].is_skip();
    });
    if (dt.variant == DtFsc::Variant::skip && skips && nt.node > 0)
      os << "  n" << nt.node << " -> n" << nt.node - 1 << " [label=\"skip\", style=dashed];\n";
  }
  for (const auto& nt : dt.nodes) {
    const std::string a = "A" + std::to_string(nt.node), t = "T" + std::to_string(nt.node);
    os << "  subgraph cluster_" << a << " {\n    label=\"" << a << "\";\n";
    emit_tree(os, nt.action_tree, dt.features, action_names, a + "_", "    ");
    os << "  }\n  subgraph cluster_" << t << " {\n    label=\"" << t << "\";\n";
    emit_tree(os, nt.transition_tree, tl, node_names, t + "_", "    ");
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dtfsc
