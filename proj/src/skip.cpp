#include "dtfsc/skip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include "controller_impl.hpp"
#include "dtfsc/error.hpp"

namespace dtfsc {

void validate(const SkipFsc& sf) { detail::validate_body(sf, true); }

SkipFsc embed(const Fsc& fsc) {
  SkipFsc sf;
  static_cast<ControllerBody&>(sf) = fsc;
  return sf;
}

std::optional<ChainWitness> find_chain_violation(const Fsc& fsc, const IterationIndex& idx) {
  for (const auto& [won, t] : idx.iteration) {
    if (t >= fsc.num_nodes) return ChainWitness{t, won, won, std::nullopt};
    for (NodeId j = t + 1; j < fsc.gamma.size(); ++j) {
      std::vector<Observation> from;
      for (const auto& [z, ch] : fsc.gamma[j]) from.push_back(z);
      std::sort(from.begin(), from.end());
      for (const auto& z : from) {
        auto to = fsc.find_delta(j, z, won);
        if (!to || *to != t) return ChainWitness{j, won, z, to};
      }
    }
  }
  return std::nullopt;
}

namespace {

std::string witness_text(const ChainWitness& w, const IterationIndex& idx) {
  std::ostringstream os;
  os << "chain property fails at node " << w.node << ", z=(" << w.from.to_string() << "), z'=("
     << w.won.to_string() << "): ";
  auto it = idx.iteration.find(w.won);
  const NodeId t = it == idx.iteration.end() ? 0 : it->second;
  if (w.node == t) {
    os << "iteration index " << t << " out of range";
  } else if (w.found) {
    os << "expected node " << t << ", found " << *w.found;
  } else {
    os << "expected node " << t << ", entry missing";
  }
  return os.str();
}

}  // namespace

void verify_chain_property(const Fsc& fsc, const IterationIndex& idx) {
  if (auto w = find_chain_violation(fsc, idx)) throw ChainViolationError(witness_text(*w, idx));
}

SkipFsc to_skip_fsc(const Fsc& fsc, const IterationIndex& idx) {
  validate(fsc);
  verify_chain_property(fsc, idx);
  SkipFsc sf = embed(fsc);
  for (const auto& [won, t] : idx.iteration) {
    NodeId jmax = t;
    for (NodeId j = t + 1; j < fsc.gamma.size(); ++j) {
      if (fsc.gamma[j].empty()) continue;
      jmax = j;
      if (j == t + 1) continue;
      for (const auto& [z, ch] : fsc.gamma[j]) sf.set_delta(j, z, won, j - 1);
    }
    for (NodeId k = t + 1; k < jmax; ++k) {
      if (fsc.find_gamma(k, won))
        throw ChainViolationError("skip at node " + std::to_string(k) + " for z=(" + won.to_string() +
                                  ") would overwrite action '" +
                                  fsc.choice_name(*fsc.find_gamma(k, won)) + "'");
      sf.set_gamma(k, won, Choice::skip());
      sf.set_delta(k, won, won, k - 1);
    }
  }
  return sf;
}

SkipStepResult skip_step(const SkipFsc& sf, const Pomdp& model, NodeId node, StateId state, Rng& rng) {
  SkipStepResult r;
  const NodeId n = detail::resolve_skips(sf, node, model.observation_of(state), &r.trace);
  r.outcome = detail::step(sf, model, n, state, &rng, std::nullopt, std::nullopt);
  return r;
}

SkipStepResult skip_step(const SkipFsc& sf, const Pomdp& model, NodeId node, StateId state,
                         StateId successor, std::optional<ActionId> action) {
  SkipStepResult r;
  const NodeId n = detail::resolve_skips(sf, node, model.observation_of(state), &r.trace);
  r.outcome = detail::step(sf, model, n, state, nullptr, successor, action);
  return r;
}

std::vector<NodeId> reachable_nodes(const SkipFsc& sf, const Pomdp& model) {
  return detail::reachable_nodes(sf, model, true);
}

std::vector<NodeTables> extract_tables(const SkipFsc& sf, const Pomdp& model) {
  return detail::extract_tables(sf, model, true);
}

ProductChain product_chain(const SkipFsc& sf, const Pomdp& model) {
  return detail::product_chain(sf, model, true);
}

EpisodeResult simulate_episode(const SkipFsc& sf, const Pomdp& model, Rng& rng, std::size_t horizon) {
  return detail::simulate(model, sf.init_node, horizon, [&](NodeId n, StateId s) {
    return skip_step(sf, model, n, s, rng).outcome;
  });
}

std::string EquivVerdict::to_string(const Pomdp& model) const {
  if (equivalent) return "equivalent\n";
  std::ostringstream os;
  for (const auto& step : prefix)
    os << "obs " << step.z.to_string() << "\nact " << model.action_name(step.action) << "\n";
  os << "obs " << last.to_string() << "\n";
  os << "fsc: " << fsc_choice << " | skip-fsc: " << skip_choice << "\n";
  return os.str();
}

namespace {

std::vector<WeightedAction> normalized_support(const ControllerBody& c, const Choice& ch) {
  auto s = detail::support(c, ch);
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.action < b.action; });
  return s;
}

bool same_support(const std::vector<WeightedAction>& a, const std::vector<WeightedAction>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].action != b[i].action || std::abs(a[i].probability - b[i].probability) > kDistTolerance)
      return false;
  return true;
}

struct Triple {
  StateId s;
  NodeId n;
  NodeId m;
  auto operator<=>(const Triple&) const = default;
};

struct Visit {
  Triple t;
  std::size_t parent;  // index into visits; self for the root
  ActionId action;     // action taken at the parent
};

}  // namespace

EquivVerdict check_equiv(const Fsc& fsc, const SkipFsc& sf, const Pomdp& model) {
  std::vector<Visit> visits;
  std::map<Triple, std::size_t> seen;
  std::deque<std::size_t> queue;
  auto push = [&](Triple t, std::size_t parent, ActionId a) {
    if (seen.emplace(t, visits.size()).second) {
      visits.push_back({t, parent == SIZE_MAX ? visits.size() : parent, a});
      queue.push_back(visits.size() - 1);
    }
  };
  auto fail = [&](std::size_t at, std::optional<ActionId> taken, const Observation& last,
                  std::string a, std::string b) {
    EquivVerdict v;
    v.equivalent = false;
    std::vector<TraceStep> rev;
    if (taken) rev.push_back({model.observation_of(visits[at].t.s), *taken});
    for (std::size_t i = at; visits[i].parent != i; i = visits[i].parent)
      rev.push_back({model.observation_of(visits[visits[i].parent].t.s), visits[i].action});
    v.prefix.assign(rev.rbegin(), rev.rend());
    v.last = last;
    v.fsc_choice = std::move(a);
    v.skip_choice = std::move(b);
    return v;
  };

  push({model.init(), fsc.init_node, sf.init_node}, SIZE_MAX, 0);
  while (!queue.empty()) {
    const std::size_t at = queue.front();
    queue.pop_front();
    const Triple cur = visits[at].t;
    if (model.is_target(cur.s)) continue;
    const Observation& z = model.observation_of(cur.s);

    const Choice* a = fsc.find_gamma(cur.n, z);
    std::optional<NodeId> resolved;
    try {
      resolved = detail::resolve_skips(sf, cur.m, z, nullptr);
    } catch (const Error&) {
    }
    const Choice* b = resolved ? sf.find_gamma(*resolved, z) : nullptr;
    if (!a && !b) continue;
    const std::string undefined = "undefined";
    if (!a || !b)
      return fail(at, std::nullopt, z, a ? fsc.choice_name(*a) : undefined,
                  b ? sf.choice_name(*b) : undefined);
    const auto sa = normalized_support(fsc, *a);
    if (!same_support(sa, normalized_support(sf, *b)))
      return fail(at, std::nullopt, z, fsc.choice_name(*a), sf.choice_name(*b));

    for (const auto& wa : sa) {
      const Dist* d = model.transition(cur.s, wa.action);
      if (!d) continue;
      for (const auto& o : *d) {
        const Observation& zn = model.observation_of(o.state);
        auto n2 = fsc.find_delta(cur.n, z, zn);
        auto m2 = sf.find_delta(*resolved, z, zn);
        if (!n2 && !m2) continue;
        if (!n2 || !m2)
          return fail(at, wa.action, zn, n2 ? "next node " + std::to_string(*n2) : "no next node",
                      m2 ? "next node " + std::to_string(*m2) : "no next node");
        push({o.state, *n2, *m2}, at, wa.action);
      }
    }
  }
  return {};
}

}  // namespace dtfsc
