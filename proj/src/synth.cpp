#include "dtfsc/synth.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "dtfsc/error.hpp"

namespace dtfsc {

namespace {

using Assignment = std::vector<std::optional<ActionId>>;

/// Depth-first search over per-observation actions in lexicographic order.
class PolicySearch {
 public:
  PolicySearch(const Pomdp& model, const std::vector<bool>& won_obs) : m_(model) {
    const std::size_t ns = m_.num_states();
    goal_.assign(ns, false);
    for (StateId s = 0; s < ns; ++s) goal_[s] = m_.is_target(s) || won_obs[m_.obs_of(s)];
    cand_.resize(m_.num_observations());
    for (ObsId z = 0; z < m_.num_observations(); ++z) {
      if (won_obs[z] || m_.is_target_observation(z)) continue;
      free_.push_back(z);
      auto en = m_.enabled(z);
      const auto states = m_.states_with(z);
      const bool absorbing =
          std::all_of(states.begin(), states.end(), [&](StateId s) { return m_.is_absorbing(s); });
      if (absorbing) cand_[z].assign(en.begin(), en.begin() + 1);
      else cand_[z].assign(en.begin(), en.end());
    }
    preds_.resize(ns);
    for (StateId s = 0; s < ns; ++s) {
      const auto ch = m_.choices(s);
      for (std::uint32_t k = 0; k < ch.size(); ++k)
        for (const auto& o : ch[k].dist) preds_[o.state].push_back({s, k});
    }
    choice_.assign(m_.num_observations(), std::nullopt);
  }

  std::optional<Assignment> run() {
    if (dfs(0)) return choice_;
    return std::nullopt;
  }

  /// Almost-sure winning states under a full or partial assignment. With
  /// `unassigned_lose`, states whose observation has no action count as lost.
  std::vector<bool> winning(const Assignment& choice) const {
    const std::size_t ns = m_.num_states();
    auto chosen = [&](StateId s, std::uint32_t k) {
      const auto& c = choice[m_.obs_of(s)];
      return !goal_[s] && c && m_.choices(s)[k].action == *c;
    };
    std::vector<bool> reach = goal_;
    std::deque<StateId> queue;
    for (StateId s = 0; s < ns; ++s)
      if (goal_[s]) queue.push_back(s);
    while (!queue.empty()) {
      const StateId t = queue.front();
      queue.pop_front();
      for (auto [s, k] : preds_[t])
        if (!reach[s] && chosen(s, k)) reach[s] = true, queue.push_back(s);
    }
    std::vector<bool> lose(ns, false);
    for (StateId s = 0; s < ns; ++s)
      if (!reach[s]) lose[s] = true, queue.push_back(s);
    while (!queue.empty()) {
      const StateId t = queue.front();
      queue.pop_front();
      for (auto [s, k] : preds_[t])
        if (!lose[s] && chosen(s, k)) lose[s] = true, queue.push_back(s);
    }
    lose.flip();
    return lose;
  }

  /// Almost-sure winning region of the MDP in which states whose observation
  /// is unassigned may pick any enabled action on their own.
  std::vector<bool> relaxed_winning(const Assignment& choice) const {
    const std::size_t ns = m_.num_states();
    std::vector<bool> alive(ns, true);
    auto allowed = [&](StateId s, std::uint32_t k) {
      if (goal_[s]) return false;
      const auto& c = choice[m_.obs_of(s)];
      return !c || m_.choices(s)[k].action == *c;
    };
    for (;;) {
      auto safe = [&](StateId s, std::uint32_t k) {
        if (!allowed(s, k)) return false;
        for (const auto& o : m_.choices(s)[k].dist)
          if (!alive[o.state]) return false;
        return true;
      };
      std::vector<bool> reach(ns, false);
      std::deque<StateId> queue;
      for (StateId s = 0; s < ns; ++s)
        if (goal_[s]) reach[s] = true, queue.push_back(s);
      while (!queue.empty()) {
        const StateId t = queue.front();
        queue.pop_front();
        for (auto [s, k] : preds_[t])
          if (alive[s] && !reach[s] && safe(s, k)) reach[s] = true, queue.push_back(s);
      }
      if (reach == alive) return alive;
      alive = std::move(reach);
    }
  }

  bool all_in(const std::vector<bool>& set, ObsId z) const {
    const auto states = m_.states_with(z);
    return std::all_of(states.begin(), states.end(), [&](StateId s) { return set[s]; });
  }

  const std::vector<ObsId>& free_observations() const { return free_; }
  std::size_t visited() const { return visited_; }

 private:
  bool dfs(std::size_t depth) {
    ++visited_;
    if (visited_ > kBudget) throw SynthesisError("policy search exceeded its node budget");
    const auto sure = winning(choice_);
    for (ObsId z : free_) {
      if (!all_in(sure, z)) continue;
      for (std::size_t k = depth; k < free_.size(); ++k) choice_[free_[k]] = cand_[free_[k]].front();
      return true;
    }
    if (depth == free_.size()) return false;
    const auto relaxed = relaxed_winning(choice_);
    if (std::none_of(free_.begin(), free_.end(), [&](ObsId z) { return all_in(relaxed, z); }))
      return false;
    const ObsId z = free_[depth];
    for (ActionId a : cand_[z]) {
      choice_[z] = a;
      if (dfs(depth + 1)) return true;
    }
    choice_[z] = std::nullopt;
    return false;
  }

  static constexpr std::size_t kBudget = 5'000'000;

  const Pomdp& m_;
  std::vector<bool> goal_;
  std::vector<ObsId> free_;
  std::vector<std::vector<ActionId>> cand_;
  std::vector<std::vector<std::pair<StateId, std::uint32_t>>> preds_;
  Assignment choice_;
  std::size_t visited_ = 0;
};

struct IdIteration {
  Assignment choice;
  std::vector<ObsId> won;
};

std::optional<IdIteration> find_by_id(const Pomdp& model, const std::vector<bool>& won_obs,
                                      std::size_t* visited) {
  PolicySearch search(model, won_obs);
  auto choice = search.run();
  if (visited) *visited += search.visited();
  if (!choice) return std::nullopt;
  IdIteration it{std::move(*choice), {}};
  const auto win = search.winning(it.choice);
  for (ObsId z : search.free_observations())
    if (search.all_in(win, z)) it.won.push_back(z);
  return it;
}

/// Observations of non-goal states reachable from `sources` under `choice`.
std::vector<ObsId> closure(const Pomdp& model, const Assignment& choice,
                           const std::vector<ObsId>& sources, const std::vector<bool>& goal) {
  std::vector<bool> seen(model.num_states(), false);
  std::deque<StateId> queue;
  for (ObsId z : sources)
    for (StateId s : model.states_with(z))
      if (!seen[s]) seen[s] = true, queue.push_back(s);
  std::vector<bool> obs(model.num_observations(), false);
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    if (goal[s]) continue;
    obs[model.obs_of(s)] = true;
    const auto& a = choice[model.obs_of(s)];
    if (!a) continue;
    if (const Dist* d = model.transition(s, *a))
      for (const auto& o : *d)
        if (!seen[o.state]) seen[o.state] = true, queue.push_back(o.state);
  }
  std::vector<ObsId> out;
  for (ObsId z = 0; z < obs.size(); ++z)
    if (obs[z]) out.push_back(z);
  return out;
}

}  // namespace

std::optional<IterationPolicy> find_iteration_policy(const Pomdp& model,
                                                     const std::set<Observation>& won) {
  std::vector<bool> won_obs(model.num_observations(), false);
  for (const auto& z : won)
    if (auto id = model.find_observation(z)) won_obs[*id] = true;
  auto it = find_by_id(model, won_obs, nullptr);
  if (!it) return std::nullopt;
  IterationPolicy out;
  for (ObsId z = 0; z < model.num_observations(); ++z)
    if (it->choice[z]) out.policy.choice[model.observation(z)] = *it->choice[z];
  for (ObsId z : it->won) out.won.push_back(model.observation(z));
  return out;
}

SynthResult synthesize(const Pomdp& model) {
  SynthResult r;
  const ObsId init_obs = model.obs_of(model.init());
  const std::size_t nz = model.num_observations();

  if (model.is_target_observation(init_obs)) {
    r.fsc = Fsc(1, 0, model.action_names());
    const Observation& z = model.observation(init_obs);
    r.fsc.set_gamma(0, z, Choice::act(model.enabled(init_obs).front()));
    for (ObsId zn = 0; zn < nz; ++zn) r.fsc.set_delta(0, z, model.observation(zn), 0);
    return r;
  }

  std::vector<bool> won(nz, false);
  for (ObsId z = 0; z < nz; ++z) won[z] = model.is_target_observation(z);
  std::vector<std::optional<NodeId>> index(nz);
  std::vector<IdIteration> iterations;
  while (!won[init_obs]) {
    auto it = find_by_id(model, won, &r.search_nodes);
    if (!it)
      throw SynthesisError("no policy wins a new observation after " +
                           std::to_string(iterations.size()) + " iterations; observation (" +
                           model.observation(init_obs).to_string() + ") of the initial state is not won");
    const auto i = static_cast<NodeId>(iterations.size());
    for (ObsId z : it->won) won[z] = true, index[z] = i;
    iterations.push_back(std::move(*it));
  }
  r.iterations = iterations.size();

  Fsc fsc(iterations.size(), static_cast<NodeId>(iterations.size() - 1), model.action_names());
  for (NodeId i = 0; i < iterations.size(); ++i) {
    std::vector<bool> goal(model.num_states(), false);
    for (StateId s = 0; s < model.num_states(); ++s) {
      const auto& k = index[model.obs_of(s)];
      goal[s] = model.is_target(s) || (k && *k < i);
    }
    const auto& iter = iterations[i];
    for (ObsId z : closure(model, iter.choice, iter.won, goal)) {
      const Observation& zo = model.observation(z);
      fsc.set_gamma(i, zo, Choice::act(*iter.choice[z]));
      for (ObsId zn = 0; zn < nz; ++zn) {
        const auto& k = index[zn];
        fsc.set_delta(i, zo, model.observation(zn), k && *k < i ? *k : i);
      }
    }
  }

  // Prune unreachable nodes, keeping iteration order among the survivors.
  const auto keep = reachable_nodes(fsc, model);
  std::vector<std::optional<NodeId>> remap(fsc.num_nodes);
  for (NodeId k = 0; k < keep.size(); ++k) remap[keep[k]] = k;
  Fsc pruned(keep.size(), *remap[fsc.init_node], model.action_names());
  for (NodeId old : keep) {
    const NodeId n = *remap[old];
    for (const auto& [z, ch] : fsc.gamma[old]) pruned.set_gamma(n, z, ch);
    for (const auto& [z, row] : fsc.delta[old])
      for (const auto& [zn, to] : row)
        if (remap[to]) pruned.set_delta(n, z, zn, *remap[to]);
  }
  for (ObsId z = 0; z < nz; ++z)
    if (index[z] && remap[*index[z]]) r.index.iteration[model.observation(z)] = *remap[*index[z]];
  r.fsc = std::move(pruned);
  verify_chain_property(r.fsc, r.index);
  return r;
}

}  // namespace dtfsc
