#include "dtfsc/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "dtfsc/error.hpp"

namespace dtfsc {

using nlohmann::json;

namespace {

/// Read-only view of a JSON value that remembers where it came from.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw SchemaError(path_.empty() ? "/" : path_, what);
  }

  Node at(const std::string& key) const {
    expect_object();
    auto it = j_->find(key);
    if (it == j_->end()) fail("missing field '" + key + "'");
    return {*it, path_ + "/" + key};
  }
  std::optional<Node> find(const std::string& key) const {
    expect_object();
    auto it = j_->find(key);
    if (it == j_->end()) return std::nullopt;
    return Node(*it, path_ + "/" + key);
  }
  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  Node operator[](std::size_t i) const { return {(*j_)[i], path_ + "/" + std::to_string(i)}; }

  void expect_object() const {
    if (!j_->is_object()) fail("expected an object");
  }
  void only_keys(std::initializer_list<const char*> keys) const {
    expect_object();
    for (const auto& [k, v] : j_->items())
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        Node(v, path_ + "/" + k).fail("unknown field '" + k + "'");
  }

  std::int64_t integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<std::int64_t>();
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) const {
    const auto v = integer();
    if (v < lo || v > hi)
      fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  std::uint32_t index(std::size_t bound, const char* what) const {
    const auto v = integer();
    if (v < 0 || static_cast<std::uint64_t>(v) >= bound)
      fail(std::string(what) + " " + std::to_string(v) + " out of range (" + std::to_string(bound) + ")");
    return static_cast<std::uint32_t>(v);
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }

 private:
  const json* j_;
  std::string path_;
};

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void expect_kind(const Node& root, const char* kind) {
  const auto k = root.at("kind").string();
  if (k != kind) root.at("kind").fail("expected kind '" + std::string(kind) + "', found '" + k + "'");
}

// Features and observations.

json features_json(const std::vector<FeatureSpec>& features) {
  json out = json::array();
  for (const auto& f : features) {
    json e{{"name", f.name}, {"type", f.is_boolean ? "bool" : "int"}};
    if (!f.is_boolean) e["lo"] = f.lo, e["hi"] = f.hi;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<FeatureSpec> parse_features(const Node& n) {
  std::vector<FeatureSpec> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node f = n[i];
    f.only_keys({"name", "type", "lo", "hi"});
    const auto name = f.at("name").string();
    const auto type = f.at("type").string();
    if (type == "bool") {
      out.push_back(FeatureSpec::boolean(name));
    } else if (type == "int") {
      const auto lo = f.at("lo").integer(INT32_MIN, INT32_MAX);
      const auto hi = f.at("hi").integer(INT32_MIN, INT32_MAX);
      if (lo > hi) f.fail("lo exceeds hi");
      out.push_back(FeatureSpec::integer(name, static_cast<Value>(lo), static_cast<Value>(hi)));
    } else {
      f.at("type").fail("unknown feature type '" + type + "'");
    }
  }
  try {
    validate_features(out);
  } catch (const ModelError& e) {
    n.fail(e.what());
  }
  return out;
}

json observation_json(const Observation& z) { return json(z.values); }

/// Observation of the given length; with `features`, also checks domains.
Observation parse_observation(const Node& n, std::size_t length,
                              const std::vector<FeatureSpec>* features = nullptr) {
  if (n.size() != length)
    n.fail("observation has " + std::to_string(n.size()) + " values, expected " + std::to_string(length));
  Observation z;
  for (std::size_t i = 0; i < length; ++i) {
    const auto v = n[i].integer(INT32_MIN, INT32_MAX);
    if (features && !(*features)[i].contains(static_cast<Value>(v)))
      n[i].fail("value " + std::to_string(v) + " outside the domain of '" + (*features)[i].name + "'");
    z.values.push_back(static_cast<Value>(v));
  }
  return z;
}

std::vector<std::string> parse_names(const Node& n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    auto s = n[i].string();
    if (std::find(out.begin(), out.end(), s) != out.end()) n[i].fail("duplicate name '" + s + "'");
    out.push_back(std::move(s));
  }
  return out;
}

ActionId action_by_name(const Node& n, const std::vector<std::string>& actions) {
  const auto name = n.string();
  auto it = std::find(actions.begin(), actions.end(), name);
  if (it == actions.end()) n.fail("unknown action '" + name + "'");
  return static_cast<ActionId>(it - actions.begin());
}

// Probabilities.

struct Rational {
  std::int64_t num;
  std::int64_t den;
};

struct Probability {
  double value;
  std::optional<Rational> exact;
};

Probability parse_probability(const Node& n) {
  if (n.raw().is_number()) return {n.raw().get<double>(), std::nullopt};
  const auto s = n.string();
  const auto slash = s.find('/');
  auto to_int = [&](const std::string& part) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      n.fail("malformed rational '" + s + "'");
    }
    if (used != part.size()) n.fail("malformed rational '" + s + "'");
    return v;
  };
  const std::int64_t num = to_int(s.substr(0, slash));
  const std::int64_t den = slash == std::string::npos ? 1 : to_int(s.substr(slash + 1));
  if (den <= 0) n.fail("rational '" + s + "' needs a positive denominator");
  return {static_cast<double>(num) / static_cast<double>(den), Rational{num, den}};
}

/// Exact sum of rationals; nullopt on overflow.
std::optional<Rational> add(Rational a, Rational b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  std::int64_t den = 0, x = 0, y = 0, num = 0;
  if (__builtin_mul_overflow(a.den / g, b.den, &den) || __builtin_mul_overflow(a.num, b.den / g, &x) ||
      __builtin_mul_overflow(b.num, a.den / g, &y) || __builtin_add_overflow(x, y, &num))
    return std::nullopt;
  const std::int64_t r = std::gcd(num, den);
  return Rational{num / r, den / r};
}

Dist parse_dist(const Node& n, std::size_t num_states, const std::string& what) {
  Dist d;
  if (n.size() == 0) n.fail("empty distribution for " + what);
  std::optional<Rational> exact = Rational{0, 1};
  double sum = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node e = n[i];
    if (e.size() != 2) e.fail("expected [state, probability]");
    const StateId s = e[0].index(num_states, "state");
    const auto p = parse_probability(e[1]);
    if (!(p.value > 0.0)) e[1].fail("probability must be strictly positive in " + what);
    if (std::any_of(d.begin(), d.end(), [&](const Outcome& o) { return o.state == s; }))
      e[0].fail("state " + std::to_string(s) + " listed twice in " + what);
    d.push_back({s, p.value});
    sum += p.value;
    exact = exact && p.exact ? add(*exact, *p.exact) : std::nullopt;
  }
  const bool ok = exact ? exact->num == exact->den : std::abs(sum - 1.0) <= kDistTolerance;
  if (!ok) {
    std::ostringstream os;
    os << "distribution for " << what << " sums to " << sum << ", expected 1";
    n.fail(os.str());
  }
  return d;
}

// Choices and controllers.

json mixed_json(const std::vector<MixedAction>& mixed, const std::vector<std::string>& actions) {
  json out = json::array();
  for (const auto& m : mixed) {
    json e = json::array();
    for (const auto& w : m.entries) e.push_back(json{{"action", actions.at(w.action)}, {"probability", w.probability}});
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<MixedAction> parse_mixed(const Node& n, const std::vector<std::string>& actions) {
  std::vector<MixedAction> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    MixedAction m;
    const Node entries = n[i];
    double sum = 0.0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const Node e = entries[k];
      e.only_keys({"action", "probability"});
      const auto p = parse_probability(e.at("probability"));
      if (!(p.value > 0.0)) e.at("probability").fail("probability must be strictly positive");
      m.entries.push_back({action_by_name(e.at("action"), actions), p.value});
      sum += p.value;
    }
    if (m.entries.empty()) entries.fail("empty mixed action");
    if (std::abs(sum - 1.0) > kDistTolerance) entries.fail("mixed action probabilities do not sum to 1");
    out.push_back(std::move(m));
  }
  return out;
}

json choice_json(const Choice& c, const std::vector<std::string>& actions) {
  switch (c.kind) {
    case Choice::Kind::skip: return "skip";
    case Choice::Kind::mixed: return json{{"mixed", c.id}};
    case Choice::Kind::action: break;
  }
  return actions.at(c.id);
}

Choice parse_choice(const Node& n, const std::vector<std::string>& actions, std::size_t num_mixed,
                    bool allow_skip) {
  if (n.raw().is_object()) {
    n.only_keys({"mixed"});
    return Choice::mixed(n.at("mixed").index(num_mixed, "mixed action"));
  }
  if (allow_skip && n.raw().is_string() && n.string() == "skip") return Choice::skip();
  return Choice::act(action_by_name(n, actions));
}

template <typename K, typename V>
std::vector<std::pair<K, V>> sorted(const std::unordered_map<K, V, ObservationHash>& m) {
  std::vector<std::pair<K, V>> out(m.begin(), m.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

json body_json(const ControllerBody& c, const char* kind) {
  json gamma = json::array(), delta = json::array();
  for (NodeId n = 0; n < c.gamma.size(); ++n)
    for (const auto& [z, ch] : sorted(c.gamma[n]))
      gamma.push_back(json{{"node", n}, {"observation", observation_json(z)}, {"choice", choice_json(ch, c.actions)}});
  for (NodeId n = 0; n < c.delta.size(); ++n)
    for (const auto& [z, row] : sorted(c.delta[n]))
      for (const auto& [zn, to] : sorted(row))
        delta.push_back(json{{"node", n},
                             {"observation", observation_json(z)},
                             {"next", observation_json(zn)},
                             {"to", to}});
  return json{{"kind", kind},
              {"nodes", c.num_nodes},
              {"init", c.init_node},
              {"actions", c.actions},
              {"mixed", mixed_json(c.mixed, c.actions)},
              {"gamma", std::move(gamma)},
              {"delta", std::move(delta)}};
}

void parse_body(const Node& root, ControllerBody& c, bool allow_skip) {
  root.only_keys({"kind", "nodes", "init", "actions", "mixed", "gamma", "delta"});
  const auto nodes = root.at("nodes").integer(1, 1 << 24);
  c.resize(static_cast<std::size_t>(nodes));
  c.init_node = root.at("init").index(c.num_nodes, "init node");
  c.actions = parse_names(root.at("actions"));
  if (auto m = root.find("mixed")) c.mixed = parse_mixed(*m, c.actions);
  std::optional<std::size_t> width;
  auto observation = [&](const Node& n) {
    if (!width) width = n.size();
    return parse_observation(n, *width);
  };
  const Node gamma = root.at("gamma");
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const Node e = gamma[i];
    e.only_keys({"node", "observation", "choice"});
    const NodeId n = e.at("node").index(c.num_nodes, "node");
    const Observation z = observation(e.at("observation"));
    if (c.find_gamma(n, z)) e.fail("duplicate gamma entry");
    c.set_gamma(n, z, parse_choice(e.at("choice"), c.actions, c.mixed.size(), allow_skip));
  }
  const Node delta = root.at("delta");
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const Node e = delta[i];
    e.only_keys({"node", "observation", "next", "to"});
    const NodeId n = e.at("node").index(c.num_nodes, "node");
    const Observation z = observation(e.at("observation"));
    const Observation zn = observation(e.at("next"));
    if (c.find_delta(n, z, zn)) e.fail("duplicate delta entry");
    c.set_delta(n, z, zn, e.at("to").index(c.num_nodes, "target node"));
  }
}

template <typename F>
void rethrow_as_schema(F&& f) {
  try {
    f();
  } catch (const ModelError& e) {
    throw SchemaError("/", e.what());
  }
}

// Trees.

json tree_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    if (n.leaf) {
      nodes.push_back(json{{"label", n.label}});
      continue;
    }
    nodes.push_back(json{{"feature", n.predicate.feature},
                         {"test", n.predicate.test == Predicate::Test::equals ? "eq" : "le"},
                         {"value", n.predicate.value},
                         {"true", n.if_true},
                         {"false", n.if_false}});
  }
  return json{{"root", t.root}, {"nodes", std::move(nodes)}};
}

DecisionTree parse_tree(const Node& root) {
  root.only_keys({"root", "nodes"});
  DecisionTree t;
  const Node nodes = root.at("nodes");
  const std::size_t count = nodes.size();
  if (count == 0) nodes.fail("tree has no nodes");
  t.root = root.at("root").index(count, "root");
  for (std::size_t i = 0; i < count; ++i) {
    const Node e = nodes[i];
    DecisionTree::Node n;
    if (e.find("label")) {
      e.only_keys({"label"});
      n.leaf = true;
      n.label = static_cast<std::uint32_t>(e.at("label").integer(0, UINT32_MAX));
    } else {
      e.only_keys({"feature", "test", "value", "true", "false"});
      n.leaf = false;
      n.predicate.feature = static_cast<std::uint32_t>(e.at("feature").integer(0, UINT32_MAX));
      const auto test = e.at("test").string();
      if (test == "eq") n.predicate.test = Predicate::Test::equals;
      else if (test == "le") n.predicate.test = Predicate::Test::less_equal;
      else e.at("test").fail("unknown test '" + test + "'");
      n.predicate.value = static_cast<Value>(e.at("value").integer(INT32_MIN, INT32_MAX));
      n.if_true = e.at("true").index(count, "child");
      n.if_false = e.at("false").index(count, "child");
    }
    t.nodes.push_back(n);
  }
  return t;
}

}  // namespace

const char* to_string(DocumentKind k) {
  switch (k) {
    case DocumentKind::pomdp: return "pomdp";
    case DocumentKind::fsc: return "fsc";
    case DocumentKind::skip_fsc: return "skip-fsc";
    case DocumentKind::dtfsc: return "dtfsc";
    case DocumentKind::iteration_index: return "iteration-index";
  }
  return "?";
}

DocumentKind document_kind(std::string_view text) {
  const json j = parse_text(text);
  const Node root(j, "");
  const Node kind = root.at("kind");
  const auto k = kind.string();
  for (auto d : {DocumentKind::pomdp, DocumentKind::fsc, DocumentKind::skip_fsc, DocumentKind::dtfsc,
                 DocumentKind::iteration_index})
    if (k == to_string(d)) return d;
  kind.fail("unknown document kind '" + k + "'");
}

std::string dump_pomdp(const Pomdp& model) {
  json states = json::array();
  for (StateId s = 0; s < model.num_states(); ++s) {
    json trans = json::object();
    for (const auto& ch : model.choices(s)) {
      json d = json::array();
      for (const auto& o : ch.dist) d.push_back(json::array({o.state, o.probability}));
      trans[model.action_name(ch.action)] = std::move(d);
    }
    states.push_back(json{{"observation", observation_json(model.observation_of(s))}, {"transitions", std::move(trans)}});
  }
  return dump(json{{"kind", "pomdp"},
                   {"features", features_json(model.features())},
                   {"actions", model.action_names()},
                   {"init", model.init()},
                   {"targets", model.targets()},
                   {"states", std::move(states)}});
}

Pomdp parse_pomdp(std::string_view text, std::vector<std::string>* warnings) {
  const json j = parse_text(text);
  const Node root(j, "");
  root.only_keys({"kind", "features", "actions", "init", "targets", "states", "rewards"});
  expect_kind(root, "pomdp");
  if (root.find("rewards") && warnings) warnings->push_back("field 'rewards' is ignored");
  auto features = parse_features(root.at("features"));
  const auto actions = parse_names(root.at("actions"));
  if (actions.empty()) root.at("actions").fail("no actions");
  const Node states = root.at("states");
  const std::size_t ns = states.size();
  if (ns == 0) states.fail("no states");
  PomdpBuilder b(features, actions);
  for (std::size_t s = 0; s < ns; ++s) {
    states[s].only_keys({"observation", "transitions"});
    b.add_state(parse_observation(states[s].at("observation"), features.size(), &features));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const Node trans = states[s].at("transitions");
    trans.expect_object();
    if (trans.raw().empty()) trans.fail("state " + std::to_string(s) + " has no enabled action");
    for (const auto& [name, value] : trans.raw().items()) {
      const Node d(value, trans.path() + "/" + name);
      auto it = std::find(actions.begin(), actions.end(), name);
      if (it == actions.end()) d.fail("unknown action '" + name + "'");
      const std::string what = "state " + std::to_string(s) + ", action '" + name + "'";
      b.set_transition(static_cast<StateId>(s), static_cast<ActionId>(it - actions.begin()), parse_dist(d, ns, what));
    }
  }
  b.set_init(root.at("init").index(ns, "init state"));
  const Node targets = root.at("targets");
  for (std::size_t i = 0; i < targets.size(); ++i) b.add_target(targets[i].index(ns, "target state"));
  try {
    return std::move(b).build();
  } catch (const ModelError& e) {
    throw SchemaError("/", e.what());
  }
}

std::string dump_fsc(const Fsc& fsc) { return dump(body_json(fsc, "fsc")); }

Fsc parse_fsc(std::string_view text) {
  const json j = parse_text(text);
  const Node root(j, "");
  expect_kind(root, "fsc");
  Fsc fsc;
  parse_body(root, fsc, false);
  rethrow_as_schema([&] { validate(fsc); });
  return fsc;
}

std::string dump_skip_fsc(const SkipFsc& sf) { return dump(body_json(sf, "skip-fsc")); }

SkipFsc parse_skip_fsc(std::string_view text) {
  const json j = parse_text(text);
  const Node root(j, "");
  expect_kind(root, "skip-fsc");
  SkipFsc sf;
  parse_body(root, sf, true);
  rethrow_as_schema([&] { validate(sf); });
  return sf;
}

std::string dump_index(const IterationIndex& idx) {
  json entries = json::array();
  for (const auto& [z, n] : idx.iteration) entries.push_back(json{{"observation", observation_json(z)}, {"node", n}});
  return dump(json{{"kind", "iteration-index"}, {"iteration", std::move(entries)}});
}

IterationIndex parse_index(std::string_view text) {
  const json j = parse_text(text);
  const Node root(j, "");
  root.only_keys({"kind", "iteration"});
  expect_kind(root, "iteration-index");
  IterationIndex idx;
  const Node entries = root.at("iteration");
  std::optional<std::size_t> width;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Node e = entries[i];
    e.only_keys({"observation", "node"});
    if (!width) width = e.at("observation").size();
    const Observation z = parse_observation(e.at("observation"), *width);
    if (idx.iteration.count(z)) e.fail("observation listed twice");
    idx.iteration[z] = static_cast<NodeId>(e.at("node").integer(0, UINT32_MAX));
  }
  return idx;
}

std::string dump_dtfsc(const DtFsc& dt) {
  json labels = json::array();
  for (const auto& l : dt.action_labels) labels.push_back(choice_json(l, dt.actions));
  json nodes = json::array();
  for (const auto& n : dt.nodes)
    nodes.push_back(json{{"node", n.node},
                         {"action_tree", tree_json(n.action_tree)},
                         {"transition_tree", tree_json(n.transition_tree)}});
  return dump(json{{"kind", "dtfsc"},
                   {"variant", to_string(dt.variant)},
                   {"nodes", dt.num_nodes},
                   {"init", dt.init_node},
                   {"features", features_json(dt.features)},
                   {"actions", dt.actions},
                   {"mixed", mixed_json(dt.mixed, dt.actions)},
                   {"action_labels", std::move(labels)},
                   {"trees", std::move(nodes)}});
}

DtFsc parse_dtfsc(std::string_view text) {
  const json j = parse_text(text);
  const Node root(j, "");
  root.only_keys({"kind", "variant", "nodes", "init", "features", "actions", "mixed", "action_labels", "trees"});
  expect_kind(root, "dtfsc");
  DtFsc dt;
  const auto variant = root.at("variant").string();
  if (variant == "plain") dt.variant = DtFsc::Variant::plain;
  else if (variant == "skip") dt.variant = DtFsc::Variant::skip;
  else root.at("variant").fail("unknown variant '" + variant + "'");
  dt.num_nodes = static_cast<std::size_t>(root.at("nodes").integer(1, 1 << 24));
  dt.init_node = root.at("init").index(dt.num_nodes, "init node");
  dt.features = parse_features(root.at("features"));
  dt.actions = parse_names(root.at("actions"));
  if (auto m = root.find("mixed")) dt.mixed = parse_mixed(*m, dt.actions);
  const Node labels = root.at("action_labels");
  for (std::size_t i = 0; i < labels.size(); ++i)
    dt.action_labels.push_back(
        parse_choice(labels[i], dt.actions, dt.mixed.size(), dt.variant == DtFsc::Variant::skip));
  const Node trees = root.at("trees");
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const Node e = trees[i];
    e.only_keys({"node", "action_tree", "transition_tree"});
    DtFsc::NodeTrees nt;
    nt.node = e.at("node").index(dt.num_nodes, "node");
    if (!dt.nodes.empty() && dt.nodes.back().node >= nt.node) e.at("node").fail("trees must be sorted by node");
    nt.action_tree = parse_tree(e.at("action_tree"));
    nt.transition_tree = parse_tree(e.at("transition_tree"));
    dt.nodes.push_back(std::move(nt));
  }
  rethrow_as_schema([&] { validate(dt); });
  return dt;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': " + std::strerror(errno));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "': " + std::strerror(errno));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace dtfsc
