#pragma once

// Machinery shared by plain and skip controllers. Not installed.

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dtfsc/error.hpp"
#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"

namespace dtfsc::detail {

/// Observations realisable after playing `a` in some state carrying `z`.
class PosteriorCache {
 public:
  explicit PosteriorCache(const Pomdp& model) : model_(model) {}
  const std::vector<ObsId>& get(ObsId z, ActionId a);

 private:
  const Pomdp& model_;
  std::vector<std::vector<std::vector<ObsId>>> cache_;
  std::vector<std::vector<bool>> ready_;
};

/// Support of a choice as (action, probability) pairs; skip has none.
std::vector<WeightedAction> support(const ControllerBody& c, const Choice& choice);

/// Follows skip choices at observation z starting from n. Returns the node
/// whose choice is not skip and appends every skipped node to `trace`.
NodeId resolve_skips(const ControllerBody& c, NodeId n, const Observation& z,
                     std::vector<NodeId>* trace);

struct ObsProduct {
  std::set<std::pair<NodeId, ObsId>> reached;
  /// First realisable (node, z, z') without delta, if any.
  std::optional<std::tuple<NodeId, ObsId, ObsId>> missing_delta;
};

/// Breadth-first exploration of (node, observation) pairs. With
/// `skip_semantics`, a skip choice at (n, z) leads to (delta(n, z, z), z).
ObsProduct explore_obs_product(const ControllerBody& c, const Pomdp& model, bool skip_semantics);

std::vector<NodeId> reachable_nodes(const ControllerBody& c, const Pomdp& model,
                                    bool skip_semantics);

std::vector<NodeTables> extract_tables(const ControllerBody& c, const Pomdp& model,
                                       bool skip_semantics);

ProductChain product_chain(const ControllerBody& c, const Pomdp& model, bool skip_semantics);

void validate_body(const ControllerBody& c, bool allow_skip);

std::string describe(const ControllerBody& c, NodeId n, const Observation& z);

ActionId pick_action(const ControllerBody& c, const Choice& ch, Rng* rng,
                     std::optional<ActionId> injected, NodeId n, const Observation& z);

/// One controller step at node `node` whose choice at obs(state) is not skip. Samples
/// from `rng` unless the successor (and for mixed choices the action) is given.
StepOutcome step(const ControllerBody& c, const Pomdp& model, NodeId node, StateId state, Rng* rng,
                 std::optional<StateId> successor, std::optional<ActionId> action);

/// Episode loop shared by every controller form. `step(n, s)` performs one
/// step and throws UndefinedGammaError/UndefinedDeltaError when stuck.
template <typename Step>
EpisodeResult simulate(const Pomdp& model, NodeId init_node, std::size_t horizon, Step&& step) {
  std::size_t steps = 0;
  StateId s = model.init();
  NodeId n = init_node;
  for (;;) {
    if (model.is_target(s)) return {EpisodeStatus::target, steps};
    if (model.is_absorbing(s)) return {EpisodeStatus::trapped, steps};
    if (steps >= horizon) return {EpisodeStatus::horizon, steps};
    try {
      auto out = step(n, s);
      s = out.next_state;
      n = out.next_node;
    } catch (const UndefinedGammaError&) {
      return {EpisodeStatus::undefined, steps};
    } catch (const UndefinedDeltaError&) {
      return {EpisodeStatus::undefined, steps};
    }
    ++steps;
  }
}

}  // namespace dtfsc::detail
