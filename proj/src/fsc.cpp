#include "dtfsc/fsc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <tuple>
#include <unordered_map>

#include "controller_impl.hpp"
#include "dtfsc/error.hpp"

namespace dtfsc {

ControllerBody::ControllerBody(std::size_t nodes, NodeId init, std::vector<std::string> action_names)
    : num_nodes(nodes), init_node(init), actions(std::move(action_names)) {
  resize(nodes);
}

void ControllerBody::resize(std::size_t nodes) {
  num_nodes = nodes;
  gamma.resize(nodes);
  delta.resize(nodes);
}

const Choice* ControllerBody::find_gamma(NodeId n, const Observation& z) const {
  if (n >= gamma.size()) return nullptr;
  auto it = gamma[n].find(z);
  return it == gamma[n].end() ? nullptr : &it->second;
}

std::optional<NodeId> ControllerBody::find_delta(NodeId n, const Observation& z,
                                                 const Observation& next) const {
  if (n >= delta.size()) return std::nullopt;
  auto it = delta[n].find(z);
  if (it == delta[n].end()) return std::nullopt;
  auto jt = it->second.find(next);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

void ControllerBody::set_gamma(NodeId n, const Observation& z, Choice c) {
  if (n >= gamma.size()) resize(n + 1);
  gamma[n][z] = c;
}

void ControllerBody::set_delta(NodeId n, const Observation& z, const Observation& next, NodeId to) {
  if (n >= delta.size()) resize(n + 1);
  delta[n][z][next] = to;
}

bool ControllerBody::erase_delta(NodeId n, const Observation& z, const Observation& next) {
  if (n >= delta.size()) return false;
  auto it = delta[n].find(z);
  if (it == delta[n].end()) return false;
  const bool erased = it->second.erase(next) > 0;
  if (it->second.empty()) delta[n].erase(it);
  return erased;
}

std::size_t ControllerBody::gamma_size() const {
  std::size_t k = 0;
  for (const auto& g : gamma) k += g.size();
  return k;
}

std::size_t ControllerBody::delta_size() const {
  std::size_t k = 0;
  for (const auto& d : delta)
    for (const auto& [z, row] : d) k += row.size();
  return k;
}

std::string ControllerBody::choice_name(const Choice& c) const {
  switch (c.kind) {
    case Choice::Kind::skip:
      return "skip";
    case Choice::Kind::action:
      return c.id < actions.size() ? actions[c.id] : "#" + std::to_string(c.id);
    case Choice::Kind::mixed: {
      std::string out;
      for (const auto& e : mixed.at(c.id).entries) {
        if (!out.empty()) out += ", ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f:", e.probability);
        out += buf;
        out += e.action < actions.size() ? actions[e.action] : "#" + std::to_string(e.action);
      }
      return out;
    }
  }
  return {};
}

const char* to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::target: return "target";
    case EpisodeStatus::horizon: return "horizon";
    case EpisodeStatus::trapped: return "trapped";
    case EpisodeStatus::undefined: return "undefined";
  }
  return "?";
}

namespace detail {

const std::vector<ObsId>& PosteriorCache::get(ObsId z, ActionId a) {
  if (cache_.empty()) {
    cache_.assign(model_.num_observations(), std::vector<std::vector<ObsId>>(model_.num_actions()));
    ready_.assign(model_.num_observations(), std::vector<bool>(model_.num_actions(), false));
  }
  if (!ready_[z][a]) {
    std::set<ObsId> out;
    for (StateId s : model_.states_with(z))
      if (const Dist* d = model_.transition(s, a))
        for (const auto& o : *d) out.insert(model_.obs_of(o.state));
    cache_[z][a].assign(out.begin(), out.end());
    ready_[z][a] = true;
  }
  return cache_[z][a];
}

std::vector<WeightedAction> support(const ControllerBody& c, const Choice& choice) {
  switch (choice.kind) {
    case Choice::Kind::action: return {{choice.id, 1.0}};
    case Choice::Kind::mixed: return c.mixed.at(choice.id).entries;
    case Choice::Kind::skip: return {};
  }
  return {};
}

std::string describe(const ControllerBody&, NodeId n, const Observation& z) {
  return "(node " + std::to_string(n) + ", z=(" + z.to_string() + "))";
}

NodeId resolve_skips(const ControllerBody& c, NodeId n, const Observation& z,
                     std::vector<NodeId>* trace) {
  for (;;) {
    const Choice* ch = c.find_gamma(n, z);
    if (!ch) throw UndefinedGammaError("gamma undefined at " + describe(c, n, z));
    if (!ch->is_skip()) return n;
    auto next = c.find_delta(n, z, z);
    if (!next)
      throw UndefinedDeltaError("skip without delta at " + describe(c, n, z));
    if (trace) trace->push_back(n);
    // Validation guarantees strictly decreasing skip targets.
    if (*next >= n) throw ModelError("skip at node " + std::to_string(n) + " does not descend");
    n = *next;
  }
}

ObsProduct explore_obs_product(const ControllerBody& c, const Pomdp& model, bool skip_semantics) {
  ObsProduct out;
  PosteriorCache post(model);
  std::deque<std::pair<NodeId, ObsId>> queue;
  auto push = [&](NodeId n, ObsId z) {
    if (out.reached.emplace(n, z).second) queue.emplace_back(n, z);
  };
  push(c.init_node, model.obs_of(model.init()));
  while (!queue.empty()) {
    auto [n, zid] = queue.front();
    queue.pop_front();
    if (model.is_target_observation(zid)) continue;
    const Observation& z = model.observation(zid);
    const Choice* ch = c.find_gamma(n, z);
    if (!ch) continue;
    if (ch->is_skip()) {
      if (!skip_semantics) continue;
      if (auto next = c.find_delta(n, z, z)) push(*next, zid);
      else if (!out.missing_delta) out.missing_delta = std::make_tuple(n, zid, zid);
      continue;
    }
    for (const auto& wa : support(c, *ch)) {
      for (ObsId zn : post.get(zid, wa.action)) {
        if (auto next = c.find_delta(n, z, model.observation(zn))) push(*next, zn);
        else if (!out.missing_delta) out.missing_delta = std::make_tuple(n, zid, zn);
      }
    }
  }
  return out;
}

std::vector<NodeId> reachable_nodes(const ControllerBody& c, const Pomdp& model,
                                    bool skip_semantics) {
  std::set<NodeId> nodes;
  for (const auto& [n, z] : explore_obs_product(c, model, skip_semantics).reached) nodes.insert(n);
  return {nodes.begin(), nodes.end()};
}

std::vector<NodeTables> extract_tables(const ControllerBody& c, const Pomdp& model,
                                       bool skip_semantics) {
  const auto product = explore_obs_product(c, model, skip_semantics);
  if (product.missing_delta) {
    auto [n, z, zn] = *product.missing_delta;
    throw ClosureError("closure violation: delta undefined at (node " + std::to_string(n) +
                       ", z=(" + model.observation(z).to_string() + "), z'=(" +
                       model.observation(zn).to_string() + "))");
  }
  std::set<NodeId> nodes;
  for (const auto& [n, z] : product.reached) nodes.insert(n);

  PosteriorCache post(model);
  std::vector<NodeTables> out;
  for (NodeId n : nodes) {
    NodeTables t;
    t.node = n;
    for (const auto& [z, ch] : c.gamma[n]) t.action_rows.push_back({z, ch});
    std::sort(t.action_rows.begin(), t.action_rows.end(),
              [](const auto& a, const auto& b) { return a.z < b.z; });
    for (const auto& row : t.action_rows) {
      auto zid = model.find_observation(row.z);
      if (!zid) continue;
      std::set<ObsId> nexts;
      if (row.choice.is_skip()) {
        nexts.insert(*zid);
      } else {
        for (const auto& wa : support(c, row.choice))
          for (ObsId zn : post.get(*zid, wa.action)) nexts.insert(zn);
      }
      for (ObsId zn : nexts) {
        const Observation& next = model.observation(zn);
        if (auto to = c.find_delta(n, row.z, next)) t.transition_rows.push_back({row.z, next, *to});
        // Missing entries at unreachable (n, z) are don't-cares.
      }
    }
    std::sort(t.transition_rows.begin(), t.transition_rows.end(), [](const auto& a, const auto& b) {
      return std::tie(a.z, a.next) < std::tie(b.z, b.next);
    });
    out.push_back(std::move(t));
  }
  return out;
}

ProductChain product_chain(const ControllerBody& c, const Pomdp& model, bool skip_semantics) {
  ProductChain pc;
  std::map<std::pair<StateId, NodeId>, StateId> index;
  std::deque<StateId> queue;
  auto intern = [&](StateId s, NodeId n) {
    auto [it, fresh] = index.emplace(std::make_pair(s, n), static_cast<StateId>(pc.states.size()));
    if (fresh) {
      pc.states.emplace_back(s, n);
      queue.push_back(it->second);
    }
    return it->second;
  };
  pc.init = intern(model.init(), c.init_node);

  // Rows are produced in id order, so the chain is assembled afterwards.
  std::vector<std::vector<Outcome>> rows;
  std::vector<bool> absorbing;
  while (!queue.empty()) {
    const StateId id = queue.front();
    queue.pop_front();
    const auto [s, n0] = pc.states[id];
    if (rows.size() <= id) rows.resize(id + 1), absorbing.resize(id + 1, false);
    if (model.is_target(s)) {
      absorbing[id] = true;
      continue;
    }
    const Observation& z = model.observation_of(s);
    NodeId n = n0;
    try {
      if (skip_semantics) n = resolve_skips(c, n0, z, nullptr);
    } catch (const Error&) {
      absorbing[id] = true;
      continue;
    }
    const Choice* ch = c.find_gamma(n, z);
    if (!ch || ch->is_skip()) {
      absorbing[id] = true;
      continue;
    }
    std::map<StateId, double> acc;
    bool broken = false;
    for (const auto& wa : support(c, *ch)) {
      const Dist* d = model.transition(s, wa.action);
      if (!d) {
        broken = true;
        break;
      }
      for (const auto& o : *d) {
        auto next = c.find_delta(n, z, model.observation_of(o.state));
        if (!next) {
          broken = true;
          break;
        }
        acc[intern(o.state, *next)] += wa.probability * o.probability;
      }
    }
    if (broken) {
      absorbing[id] = true;
      continue;
    }
    for (const auto& [t, p] : acc) rows[id].push_back({t, p});
  }
  rows.resize(pc.states.size());
  absorbing.resize(pc.states.size(), false);
  pc.goal.assign(pc.states.size(), false);
  for (StateId id = 0; id < pc.states.size(); ++id) {
    pc.goal[id] = model.is_target(pc.states[id].first);
    if (absorbing[id]) pc.chain.add_absorbing();
    else pc.chain.add_state(rows[id], std::nullopt);
  }
  return pc;
}

void validate_body(const ControllerBody& c, bool allow_skip) {
  if (c.num_nodes == 0) throw ModelError("controller has no nodes");
  if (c.init_node >= c.num_nodes) throw ModelError("init node out of range");
  if (c.gamma.size() > c.num_nodes || c.delta.size() > c.num_nodes)
    throw ModelError("controller tables reference nodes beyond num_nodes");
  for (std::size_t i = 0; i < c.mixed.size(); ++i) {
    const auto& m = c.mixed[i];
    if (m.entries.empty()) throw ModelError("mixed action " + std::to_string(i) + " is empty");
    double sum = 0;
    for (const auto& e : m.entries) {
      if (e.action >= c.actions.size())
        throw ModelError("mixed action " + std::to_string(i) + " references unknown action");
      if (!(e.probability > 0)) throw ModelError("mixed action " + std::to_string(i) + " has non-positive weight");
      sum += e.probability;
    }
    if (std::abs(sum - 1.0) > kDistTolerance)
      throw ModelError("mixed action " + std::to_string(i) + " does not sum to 1");
  }
  for (NodeId n = 0; n < c.gamma.size(); ++n) {
    for (const auto& [z, ch] : c.gamma[n]) {
      switch (ch.kind) {
        case Choice::Kind::action:
          if (ch.id >= c.actions.size())
            throw ModelError("gamma at " + describe(c, n, z) + " uses unknown action id");
          break;
        case Choice::Kind::mixed:
          if (ch.id >= c.mixed.size())
            throw ModelError("gamma at " + describe(c, n, z) + " uses unknown mixed action");
          break;
        case Choice::Kind::skip: {
          if (!allow_skip) throw ModelError("plain controller has skip at " + describe(c, n, z));
          auto to = c.find_delta(n, z, z);
          if (!to) throw ModelError("skip at " + describe(c, n, z) + " lacks delta(n, z, z)");
          if (*to >= n)
            throw ModelError("skip at " + describe(c, n, z) + " must descend to a smaller node");
          break;
        }
      }
    }
  }
  for (NodeId n = 0; n < c.delta.size(); ++n)
    for (const auto& [z, row] : c.delta[n])
      for (const auto& [zn, to] : row)
        if (to >= c.num_nodes)
          throw ModelError("delta at " + describe(c, n, z) + " targets node " + std::to_string(to) +
                           " >= num_nodes " + std::to_string(c.num_nodes));
}

}  // namespace detail

void validate(const Fsc& fsc) { detail::validate_body(fsc, false); }

void validate_against(const ControllerBody& c, const Pomdp& model) {
  if (c.actions != model.action_names())
    throw ModelError("controller action names do not match the model's action list");
  for (NodeId n = 0; n < c.gamma.size(); ++n) {
    for (const auto& [z, ch] : c.gamma[n]) {
      if (z.size() != model.features().size())
        throw ModelError("gamma at " + detail::describe(c, n, z) + " has wrong observation length");
      auto zid = model.find_observation(z);
      if (!zid) continue;  // never consulted on this model
      auto en = model.enabled(*zid);
      for (const auto& wa : detail::support(c, ch))
        if (std::find(en.begin(), en.end(), wa.action) == en.end())
          throw ModelError("gamma at " + detail::describe(c, n, z) + " chooses disabled action '" +
                           model.action_name(wa.action) + "'");
    }
  }
}

namespace detail {

ActionId pick_action(const ControllerBody& fsc, const Choice& ch, Rng* rng, std::optional<ActionId> injected,
                     NodeId n, const Observation& z) {
  if (ch.kind == Choice::Kind::action) return ch.id;
  const auto& entries = fsc.mixed.at(ch.id).entries;
  if (injected) {
    for (const auto& e : entries)
      if (e.action == *injected) return *injected;
    throw Error("injected action not in the support of the mixed choice at " +
                describe(fsc, n, z));
  }
  if (!rng) return entries.front().action;
  return entries[sample_index(*rng, entries, [](const auto& e) { return e.probability; })].action;
}

StepOutcome step(const ControllerBody& fsc, const Pomdp& model, NodeId node, StateId state, Rng* rng,
                      std::optional<StateId> successor, std::optional<ActionId> action) {
  const Observation& z = model.observation_of(state);
  const Choice* ch = fsc.find_gamma(node, z);
  if (!ch) throw UndefinedGammaError("gamma undefined at " + describe(fsc, node, z));
  const ActionId a = pick_action(fsc, *ch, rng, action, node, z);
  const Dist* d = model.transition(state, a);
  if (!d) throw ModelError("action '" + model.action_name(a) + "' not enabled in state " + std::to_string(state));
  StateId next;
  if (successor) {
    if (std::none_of(d->begin(), d->end(), [&](const Outcome& o) { return o.state == *successor; }))
      throw Error("state " + std::to_string(*successor) + " is not a successor of state " +
                  std::to_string(state) + " under '" + model.action_name(a) + "'");
    next = *successor;
  } else {
    next = (*d)[sample_index(*rng, *d, [](const Outcome& o) { return o.probability; })].state;
  }
  const Observation& zn = model.observation_of(next);
  auto n2 = fsc.find_delta(node, z, zn);
  if (!n2)
    throw UndefinedDeltaError("delta undefined at (node " + std::to_string(node) + ", z=(" +
                              z.to_string() + "), z'=(" + zn.to_string() + "))");
  return {a, *n2, next, zn};
}

}  // namespace detail

StepOutcome fsc_step(const Fsc& fsc, const Pomdp& model, NodeId node, StateId state, Rng& rng) {
  return detail::step(fsc, model, node, state, &rng, std::nullopt, std::nullopt);
}

StepOutcome fsc_step(const Fsc& fsc, const Pomdp& model, NodeId node, StateId state,
                     StateId successor, std::optional<ActionId> action) {
  return detail::step(fsc, model, node, state, nullptr, successor, action);
}

std::vector<NodeId> reachable_nodes(const Fsc& fsc, const Pomdp& model) {
  return detail::reachable_nodes(fsc, model, false);
}

std::vector<NodeTables> extract_tables(const Fsc& fsc, const Pomdp& model) {
  return detail::extract_tables(fsc, model, false);
}

Fsc fsc_from_tables(const std::vector<NodeTables>& tables, std::size_t num_nodes, NodeId init,
                    std::vector<std::string> actions, std::vector<MixedAction> mixed) {
  Fsc fsc(num_nodes, init, std::move(actions));
  fsc.mixed = std::move(mixed);
  for (const auto& t : tables) {
    for (const auto& r : t.action_rows) fsc.set_gamma(t.node, r.z, r.choice);
    for (const auto& r : t.transition_rows) fsc.set_delta(t.node, r.z, r.next, r.to);
  }
  return fsc;
}

ProductChain product_chain(const Fsc& fsc, const Pomdp& model) {
  return detail::product_chain(fsc, model, false);
}

EpisodeResult simulate_episode(const Fsc& fsc, const Pomdp& model, Rng& rng, std::size_t horizon) {
  return detail::simulate(model, fsc.init_node, horizon, [&](NodeId n, StateId s) {
    return fsc_step(fsc, model, n, s, rng);
  });
}

}  // namespace dtfsc
