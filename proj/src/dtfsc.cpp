#include "dtfsc/dtfsc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include "controller_impl.hpp"
#include "dtfsc/error.hpp"

namespace dtfsc {

const DtFsc::NodeTrees* DtFsc::find(NodeId n) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), n,
                             [](const NodeTrees& t, NodeId id) { return t.node < id; });
  return it != nodes.end() && it->node == n ? &*it : nullptr;
}

std::string DtFsc::label_name(std::uint32_t label) const {
  if (label >= action_labels.size()) return "#" + std::to_string(label);
  ControllerBody view;
  view.actions = actions;
  view.mixed = mixed;
  return view.choice_name(action_labels[label]);
}

const char* to_string(DtFsc::Variant v) { return v == DtFsc::Variant::plain ? "plain" : "skip"; }

std::vector<FeatureSpec> transition_layout(const std::vector<FeatureSpec>& features) {
  std::vector<FeatureSpec> out = features;
  for (auto f : features) {
    f.name += '\'';
    out.push_back(std::move(f));
  }
  return out;
}

void validate(const DtFsc& dt) {
  if (dt.num_nodes == 0) throw ModelError("DT-FSC has no nodes");
  if (dt.init_node >= dt.num_nodes) throw ModelError("DT-FSC init node out of range");
  validate_features(dt.features);
  for (const auto& l : dt.action_labels) {
    if (l.kind == Choice::Kind::action && l.id >= dt.actions.size())
      throw ModelError("action label references unknown action id " + std::to_string(l.id));
    if (l.kind == Choice::Kind::mixed && l.id >= dt.mixed.size())
      throw ModelError("action label references unknown mixed action " + std::to_string(l.id));
    if (l.kind == Choice::Kind::skip && dt.variant != DtFsc::Variant::skip)
      throw ModelError("plain DT-FSC carries a skip label");
  }
  const auto tl = transition_layout(dt.features);
  for (std::size_t i = 0; i < dt.nodes.size(); ++i) {
    const auto& n = dt.nodes[i];
    if (n.node >= dt.num_nodes) throw ModelError("DT-FSC node id " + std::to_string(n.node) + " out of range");
    if (i > 0 && dt.nodes[i - 1].node >= n.node) throw ModelError("DT-FSC nodes not sorted by id");
    validate(n.action_tree, dt.features, dt.action_labels.size());
    validate(n.transition_tree, tl, dt.num_nodes);
  }
  if (!dt.find(dt.init_node)) throw ModelError("DT-FSC has no trees for its init node");
}

Dataset action_dataset(const NodeTables& t, const std::vector<FeatureSpec>& features,
                       const std::vector<Choice>& labels, const ControllerBody& c) {
  Dataset ds;
  ds.layout = features;
  for (const auto& l : labels) ds.label_names.push_back(c.choice_name(l));
  for (const auto& r : t.action_rows) {
    auto it = std::lower_bound(labels.begin(), labels.end(), r.choice);
    ds.rows.push_back({r.z.values, static_cast<std::uint32_t>(it - labels.begin())});
  }
  return ds;
}

Dataset transition_dataset(const NodeTables& t, const std::vector<FeatureSpec>& features,
                           std::size_t num_nodes) {
  Dataset ds;
  ds.layout = transition_layout(features);
  for (std::size_t n = 0; n < num_nodes; ++n) ds.label_names.push_back("n" + std::to_string(n));
  for (const auto& r : t.transition_rows) {
    std::vector<Value> x = r.z.values;
    x.insert(x.end(), r.next.values.begin(), r.next.values.end());
    ds.rows.push_back({std::move(x), r.to});
  }
  return ds;
}

namespace {

DtFsc build(const ControllerBody& c, const Pomdp& model, bool skip, const BuildOptions& options) {
  const auto tables = detail::extract_tables(c, model, skip);
  DtFsc dt;
  dt.variant = skip ? DtFsc::Variant::skip : DtFsc::Variant::plain;
  dt.num_nodes = c.num_nodes;
  dt.init_node = c.init_node;
  dt.features = model.features();
  dt.actions = c.actions;
  dt.mixed = c.mixed;
  std::set<Choice> labels;
  for (const auto& t : tables)
    for (const auto& r : t.action_rows) labels.insert(r.choice);
  if (labels.empty()) labels.insert(Choice::act(0));
  dt.action_labels.assign(labels.begin(), labels.end());
  dt.nodes.resize(tables.size());

  auto work = [&](std::size_t i) {
    const auto& t = tables[i];
    auto& out = dt.nodes[i];
    out.node = t.node;
    // Nodes without rows (only entered at target observations) get leaves;
    // nothing ever consults them.
    out.action_tree = t.action_rows.empty()
                          ? DecisionTree::single_leaf(0)
                          : learn(action_dataset(t, dt.features, dt.action_labels, c), options.learn);
    out.transition_tree = t.transition_rows.empty()
                              ? DecisionTree::single_leaf(t.node)
                              : learn(transition_dataset(t, dt.features, dt.num_nodes), options.learn);
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tables.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tables.size(); ++i) work(i);
    return dt;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tables.size());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < tables.size();) {
        try {
          work(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return dt;
}

}  // namespace

DtFsc build_dtfsc(const Fsc& fsc, const Pomdp& model, const BuildOptions& options) {
  return build(fsc, model, false, options);
}

DtFsc build_dtfsc(const SkipFsc& sf, const Pomdp& model, const BuildOptions& options) {
  return build(sf, model, true, options);
}

namespace {

const DtFsc::NodeTrees& trees_of(const DtFsc& dt, NodeId n, const Observation& z) {
  const auto* t = dt.find(n);
  if (!t) throw UndefinedGammaError("DT-FSC has no trees at (node " + std::to_string(n) + ", z=(" +
                                    z.to_string() + "))");
  return *t;
}

std::vector<Value> concat(const Observation& a, const Observation& b) {
  std::vector<Value> x = a.values;
  x.insert(x.end(), b.values.begin(), b.values.end());
  return x;
}

DtStepResult step_impl(const DtFsc& dt, const Pomdp& model, NodeId node, StateId state, Rng* rng,
                       std::optional<StateId> successor, std::optional<ActionId> injected) {
  DtStepResult r;
  const Observation& z = model.observation_of(state);
  const auto layout = transition_layout(dt.features);
  NodeId n = node;
  const DtFsc::NodeTrees* t = &trees_of(dt, n, z);
  std::uint32_t label = evaluate(t->action_tree, dt.features, z.values);
  while (dt.action_labels.at(label).is_skip()) {
    if (dt.variant != DtFsc::Variant::skip) throw ModelError("skip label in a plain DT-FSC");
    const NodeId to = evaluate(t->transition_tree, layout, concat(z, z));
    if (to >= n) throw ModelError("skip at node " + std::to_string(n) + " does not descend");
    r.trace.push_back(n);
    n = to;
    t = &trees_of(dt, n, z);
    label = evaluate(t->action_tree, dt.features, z.values);
  }
  const Choice& ch = dt.action_labels[label];
  ActionId a = ch.id;
  if (ch.kind == Choice::Kind::mixed) {
    const auto& entries = dt.mixed.at(ch.id).entries;
    if (injected) {
      if (std::none_of(entries.begin(), entries.end(), [&](const auto& e) { return e.action == *injected; }))
        throw Error("injected action not in the support of the mixed label at node " + std::to_string(n));
      a = *injected;
    } else if (rng) {
      a = entries[sample_index(*rng, entries, [](const auto& e) { return e.probability; })].action;
    } else {
      a = entries.front().action;
    }
  }
  const Dist* d = model.transition(state, a);
  if (!d) throw ModelError("action '" + model.action_name(a) + "' not enabled in state " + std::to_string(state));
  StateId next;
  if (successor) {
    if (std::none_of(d->begin(), d->end(), [&](const Outcome& o) { return o.state == *successor; }))
      throw Error("state " + std::to_string(*successor) + " is not a successor of state " +
                  std::to_string(state));
    next = *successor;
  } else {
    next = (*d)[sample_index(*rng, *d, [](const Outcome& o) { return o.probability; })].state;
  }
  const Observation& zn = model.observation_of(next);
  const NodeId n2 = evaluate(t->transition_tree, layout, concat(z, zn));
  r.outcome = {a, n2, next, zn};
  return r;
}

}  // namespace

DtStepResult dtfsc_step(const DtFsc& dt, const Pomdp& model, NodeId node, StateId state, Rng& rng) {
  return step_impl(dt, model, node, state, &rng, std::nullopt, std::nullopt);
}

DtStepResult dtfsc_step(const DtFsc& dt, const Pomdp& model, NodeId node, StateId state,
                        StateId successor, std::optional<ActionId> action) {
  return step_impl(dt, model, node, state, nullptr, successor, action);
}

EpisodeResult simulate_episode(const DtFsc& dt, const Pomdp& model, Rng& rng, std::size_t horizon) {
  return detail::simulate(model, dt.init_node, horizon, [&](NodeId n, StateId s) {
    return dtfsc_step(dt, model, n, s, rng).outcome;
  });
}

std::string FaithfulVerdict::to_string() const {
  if (equal) return "equal";
  std::ostringstream os;
  os << tree << " tree of node " << node << " on (";
  for (std::size_t i = 0; i < input.size(); ++i) os << (i ? "," : "") << input[i];
  os << "): table says " << expected << ", tree says " << actual;
  return os.str();
}

namespace {

bool same_choice(const ControllerBody& c, const Choice& a, const DtFsc& dt, const Choice& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Choice::Kind::skip) return true;
  auto sa = detail::support(c, a);
  ControllerBody view;
  view.mixed = dt.mixed;
  auto sb = detail::support(view, b);
  if (sa.size() != sb.size()) return false;
  auto by_action = [](const auto& x, const auto& y) { return x.action < y.action; };
  std::sort(sa.begin(), sa.end(), by_action);
  std::sort(sb.begin(), sb.end(), by_action);
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (sa[i].action != sb[i].action || std::abs(sa[i].probability - sb[i].probability) > kDistTolerance)
      return false;
  return true;
}

FaithfulVerdict faithful(const ControllerBody& c, const DtFsc& dt, const Pomdp& model, bool skip) {
  const auto layout = transition_layout(dt.features);
  for (const auto& t : detail::extract_tables(c, model, skip)) {
    const auto* trees = dt.find(t.node);
    if (!trees) {
      FaithfulVerdict v;
      v.equal = false;
      v.node = t.node;
      v.tree = "action";
      v.expected = "trees for the node";
      v.actual = "none";
      return v;
    }
    for (const auto& r : t.action_rows) {
      const auto label = trees->action_tree.evaluate(r.z.values);
      if (label >= dt.action_labels.size() || !same_choice(c, r.choice, dt, dt.action_labels[label]))
        return {false, t.node, "action", r.z.values, c.choice_name(r.choice), dt.label_name(label)};
    }
    for (const auto& r : t.transition_rows) {
      auto x = concat(r.z, r.next);
      const auto to = trees->transition_tree.evaluate(x);
      if (to != r.to)
        return {false, t.node, "transition", std::move(x), "n" + std::to_string(r.to), "n" + std::to_string(to)};
    }
  }
  return {};
}

}  // namespace

FaithfulVerdict check_faithful(const Fsc& fsc, const DtFsc& dt, const Pomdp& model) {
  return faithful(fsc, dt, model, false);
}

FaithfulVerdict check_faithful(const SkipFsc& sf, const DtFsc& dt, const Pomdp& model) {
  return faithful(sf, dt, model, true);
}

std::size_t action_tree_total(const DtFsc& dt) {
  std::size_t k = 0;
  for (const auto& n : dt.nodes) k += tree_size(n.action_tree);
  return k;
}

std::size_t transition_tree_total(const DtFsc& dt) {
  std::size_t k = 0;
  for (const auto& n : dt.nodes) k += tree_size(n.transition_tree);
  return k;
}

}  // namespace dtfsc
