#include "dtfsc/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dtfsc/error.hpp"

namespace dtfsc {

void validate_features(std::span<const FeatureSpec> features) {
  std::unordered_set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw ModelError("feature with empty name");
    if (!seen.insert(f.name).second) throw ModelError("duplicate feature name '" + f.name + "'");
    if (f.lo > f.hi) throw ModelError("feature '" + f.name + "' has lo > hi");
    if (f.is_boolean && (f.lo != 0 || f.hi != 1))
      throw ModelError("boolean feature '" + f.name + "' must have domain [0, 1]");
  }
}

std::string Observation::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::size_t ObservationHash::operator()(const Observation& z) const noexcept {
  // FNV-1a over the little-endian value bytes.
  std::uint64_t h = 1469598103934665603ull;
  for (Value v : z.values) {
    auto u = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h);
}

PomdpBuilder::PomdpBuilder(std::vector<FeatureSpec> features, std::vector<std::string> actions)
    : features_(std::move(features)), actions_(std::move(actions)) {}

StateId PomdpBuilder::add_state(Observation z) {
  state_obs_.push_back(std::move(z));
  trans_.emplace_back();
  return static_cast<StateId>(state_obs_.size() - 1);
}

void PomdpBuilder::set_transition(StateId s, ActionId a, Dist d) {
  if (s >= trans_.size()) throw ModelError("transition from unknown state " + std::to_string(s));
  if (a >= actions_.size()) throw ModelError("unknown action id " + std::to_string(a));
  trans_[s][a] = std::move(d);
}

namespace {

void validate_dist(const Dist& d, std::size_t num_states, StateId s, const std::string& action) {
  const auto where = [&] { return "state " + std::to_string(s) + ", action '" + action + "'"; };
  if (d.empty()) throw ModelError("empty distribution at " + where());
  double sum = 0.0;
  std::unordered_set<StateId> ids;
  for (const auto& o : d) {
    if (o.state >= num_states)
      throw ModelError("successor " + std::to_string(o.state) + " out of range at " + where());
    if (!(o.probability > 0.0)) throw ModelError("non-positive probability at " + where());
    if (!ids.insert(o.state).second)
      throw ModelError("duplicate successor " + std::to_string(o.state) + " at " + where());
    sum += o.probability;
  }
  if (std::abs(sum - 1.0) > kDistTolerance) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << " at " << where();
    throw ModelError(os.str());
  }
}

}  // namespace

Pomdp PomdpBuilder::build() && {
  validate_features(features_);
  {
    std::unordered_set<std::string> names;
    for (const auto& a : actions_) {
      if (a.empty()) throw ModelError("action with empty name");
      if (a == "skip") throw ModelError("action name 'skip' is reserved");
      if (!names.insert(a).second) throw ModelError("duplicate action name '" + a + "'");
    }
  }
  const std::size_t n = state_obs_.size();
  if (n == 0) throw ModelError("model has no states");
  for (StateId s = 0; s < n; ++s) {
    const auto& z = state_obs_[s];
    if (z.size() != features_.size())
      throw ModelError("state " + std::to_string(s) + " observation has " + std::to_string(z.size()) +
                       " values, expected " + std::to_string(features_.size()));
    for (std::size_t i = 0; i < z.size(); ++i)
      if (!features_[i].contains(z[i]))
        throw ModelError("state " + std::to_string(s) + " feature '" + features_[i].name +
                         "' value " + std::to_string(z[i]) + " outside domain");
    if (trans_[s].empty()) throw ModelError("state " + std::to_string(s) + " has no enabled action");
    for (const auto& [a, d] : trans_[s]) validate_dist(d, n, s, actions_[a]);
  }
  if (init_ >= n) throw ModelError("initial state out of range");
  for (StateId t : targets_)
    if (t >= n) throw ModelError("target state " + std::to_string(t) + " out of range");

  Pomdp m;
  m.features_ = std::move(features_);
  m.actions_ = std::move(actions_);

  std::set<Observation> distinct(state_obs_.begin(), state_obs_.end());
  m.obs_table_.assign(distinct.begin(), distinct.end());
  m.state_obs_.resize(n);
  m.states_by_obs_.resize(m.obs_table_.size());
  for (StateId s = 0; s < n; ++s) {
    auto it = std::lower_bound(m.obs_table_.begin(), m.obs_table_.end(), state_obs_[s]);
    m.state_obs_[s] = static_cast<ObsId>(it - m.obs_table_.begin());
    m.states_by_obs_[m.state_obs_[s]].push_back(s);
  }

  m.trans_.resize(n);
  for (StateId s = 0; s < n; ++s)
    for (auto& [a, d] : trans_[s]) m.trans_[s].push_back({a, std::move(d)});

  m.enabled_by_obs_.resize(m.obs_table_.size());
  for (ObsId z = 0; z < m.obs_table_.size(); ++z) {
    std::vector<ActionId> first;
    for (const auto& c : m.trans_[m.states_by_obs_[z].front()]) first.push_back(c.action);
    for (StateId s : m.states_by_obs_[z]) {
      std::vector<ActionId> here;
      for (const auto& c : m.trans_[s]) here.push_back(c.action);
      if (here != first)
        throw ModelError("states " + std::to_string(m.states_by_obs_[z].front()) + " and " +
                         std::to_string(s) + " share observation (" + m.obs_table_[z].to_string() +
                         ") but enable different actions");
    }
    m.enabled_by_obs_[z] = std::move(first);
  }

  m.init_ = init_;
  std::sort(targets_.begin(), targets_.end());
  targets_.erase(std::unique(targets_.begin(), targets_.end()), targets_.end());
  m.targets_ = std::move(targets_);
  m.target_mask_.assign(n, false);
  for (StateId t : m.targets_) m.target_mask_[t] = true;
  m.target_obs_mask_.assign(m.obs_table_.size(), false);
  for (StateId t : m.targets_) m.target_obs_mask_[m.state_obs_[t]] = true;
  for (StateId s = 0; s < n; ++s)
    if (m.target_obs_mask_[m.state_obs_[s]] && !m.target_mask_[s])
      throw ModelError("state " + std::to_string(s) + " shares observation (" +
                       m.observation_of(s).to_string() + ") with a target but is not a target");
  return m;
}

std::optional<ActionId> Pomdp::find_action(std::string_view name) const {
  for (ActionId a = 0; a < actions_.size(); ++a)
    if (actions_[a] == name) return a;
  return std::nullopt;
}

std::optional<ObsId> Pomdp::find_observation(const Observation& z) const {
  auto it = std::lower_bound(obs_table_.begin(), obs_table_.end(), z);
  if (it == obs_table_.end() || *it != z) return std::nullopt;
  return static_cast<ObsId>(it - obs_table_.begin());
}

const Dist* Pomdp::transition(StateId s, ActionId a) const {
  for (const auto& c : trans_[s])
    if (c.action == a) return &c.dist;
  return nullptr;
}

bool Pomdp::is_absorbing(StateId s) const {
  for (const auto& c : trans_[s])
    if (c.dist.size() != 1 || c.dist.front().state != s) return false;
  return true;
}

void InducedChain::add_state(std::span<const Outcome> succ, std::optional<ActionId> action) {
  outcomes_.insert(outcomes_.end(), succ.begin(), succ.end());
  offsets_.push_back(outcomes_.size());
  absorbing_.push_back(false);
  chosen_.push_back(action);
}

void InducedChain::add_absorbing() {
  const auto s = static_cast<StateId>(size());
  outcomes_.push_back({s, 1.0});
  offsets_.push_back(outcomes_.size());
  absorbing_.push_back(true);
  chosen_.push_back(std::nullopt);
}

std::vector<ActionId> enabled_actions(const Pomdp& model, const Observation& z) {
  auto id = model.find_observation(z);
  if (!id) throw UnknownObservationError("no state carries observation (" + z.to_string() + ")");
  auto en = model.enabled(*id);
  return {en.begin(), en.end()};
}

InducedChain induce_chain_by_id(const Pomdp& model,
                                std::span<const std::optional<ActionId>> choice,
                                const std::vector<bool>& frontier,
                                std::span<const StateId> sources) {
  const std::size_t n = model.num_states();
  auto stops = [&](StateId s) { return model.is_target(s) || frontier[model.obs_of(s)]; };

  // Reachability from the sources decides which missing choices are errors.
  std::vector<bool> seen(n, false);
  std::deque<StateId> queue;
  for (StateId s : sources)
    if (!seen[s]) seen[s] = true, queue.push_back(s);
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    if (stops(s)) continue;
    const auto z = model.obs_of(s);
    if (!choice[z])
      throw MissingChoiceError("policy has no choice for reachable observation (" +
                               model.observation(z).to_string() + ")");
    const Dist* d = model.transition(s, *choice[z]);
    if (!d)
      throw ModelError("policy action '" + model.action_name(*choice[z]) +
                       "' not enabled for observation (" + model.observation(z).to_string() + ")");
    for (const auto& o : *d)
      if (!seen[o.state]) seen[o.state] = true, queue.push_back(o.state);
  }

  InducedChain chain;
  for (StateId s = 0; s < n; ++s) {
    const auto z = model.obs_of(s);
    if (stops(s) || !choice[z]) {
      chain.add_absorbing();
      continue;
    }
    const Dist* d = model.transition(s, *choice[z]);
    if (!d) {
      chain.add_absorbing();
      continue;
    }
    chain.add_state(*d, *choice[z]);
  }
  return chain;
}

InducedChain induce_chain(const Pomdp& model, const StationaryObsPolicy& policy,
                          std::span<const Observation> frontier,
                          std::span<const StateId> sources) {
  std::vector<std::optional<ActionId>> choice(model.num_observations());
  for (const auto& [z, a] : policy.choice) {
    auto id = model.find_observation(z);
    if (!id) continue;
    auto en = model.enabled(*id);
    if (std::find(en.begin(), en.end(), a) == en.end())
      throw ModelError("policy action id " + std::to_string(a) + " not enabled for observation (" +
                       z.to_string() + ")");
    choice[*id] = a;
  }
  std::vector<bool> front(model.num_observations(), false);
  for (const auto& z : frontier)
    if (auto id = model.find_observation(z)) front[*id] = true;
  return induce_chain_by_id(model, choice, front, sources);
}

InducedChain induce_chain(const Pomdp& model, const StationaryObsPolicy& policy,
                          std::span<const Observation> frontier) {
  const StateId init = model.init();
  return induce_chain(model, policy, frontier, std::span<const StateId>(&init, 1));
}

std::vector<bool> can_reach(const InducedChain& chain, const std::vector<bool>& goal) {
  const std::size_t n = chain.size();
  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s)
    for (const auto& o : chain.successors(s)) pred[o.state].push_back(s);
  std::vector<bool> ok(n, false);
  std::vector<StateId> stack;
  for (StateId s = 0; s < n; ++s)
    if (goal[s]) ok[s] = true, stack.push_back(s);
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : pred[s])
      if (!ok[p]) ok[p] = true, stack.push_back(p);
  }
  return ok;
}

bool almost_sure_reach(const InducedChain& chain, const std::vector<bool>& goal, StateId from) {
  const auto ok = can_reach(chain, goal);
  std::vector<bool> seen(chain.size(), false);
  std::vector<StateId> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    if (goal[s]) continue;
    if (!ok[s]) return false;
    for (const auto& o : chain.successors(s))
      if (!seen[o.state]) seen[o.state] = true, stack.push_back(o.state);
  }
  return true;
}

bool almost_sure_reach(const InducedChain& chain, std::span<const StateId> goal, StateId from) {
  std::vector<bool> mask(chain.size(), false);
  for (StateId g : goal) mask.at(g) = true;
  return almost_sure_reach(chain, mask, from);
}

}  // namespace dtfsc
