#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dtfsc/pomdp.hpp"
#include "dtfsc/random.hpp"

namespace dtfsc {

struct WeightedAction {
  ActionId action;
  double probability;

  friend bool operator==(const WeightedAction&, const WeightedAction&) = default;
};

/// Finite randomisation over actions, as produced by controllers that hedge
/// at cutoff points.
struct MixedAction {
  std::vector<WeightedAction> entries;

  friend bool operator==(const MixedAction&, const MixedAction&) = default;
};

/// Output of the action mapping: a concrete action, the skip marker (skip
/// controllers only) or an index into the controller's table of mixed actions.
struct Choice {
  enum class Kind : std::uint8_t { action, skip, mixed };

  Kind kind = Kind::action;
  std::uint32_t id = 0;

  static Choice act(ActionId a) { return {Kind::action, a}; }
  static Choice skip() { return {Kind::skip, 0}; }
  static Choice mixed(std::uint32_t index) { return {Kind::mixed, index}; }

  bool is_skip() const { return kind == Kind::skip; }

  friend bool operator==(const Choice&, const Choice&) = default;
  friend auto operator<=>(const Choice&, const Choice&) = default;
};

/// Storage shared by plain and skip controllers: a posterior-aware Mealy
/// machine with partial gamma (node, z) and delta (node, z, z').
struct ControllerBody {
  using GammaRow = std::unordered_map<Observation, Choice, ObservationHash>;
  using DeltaRow =
      std::unordered_map<Observation, std::unordered_map<Observation, NodeId, ObservationHash>,
                         ObservationHash>;

  std::size_t num_nodes = 1;
  NodeId init_node = 0;
  /// Action names in id order; must match the model the controller runs on.
  std::vector<std::string> actions;
  std::vector<MixedAction> mixed;
  std::vector<GammaRow> gamma;  // indexed by node
  std::vector<DeltaRow> delta;  // indexed by node

  ControllerBody() = default;
  ControllerBody(std::size_t nodes, NodeId init, std::vector<std::string> action_names);

  void resize(std::size_t nodes);

  const Choice* find_gamma(NodeId n, const Observation& z) const;
  std::optional<NodeId> find_delta(NodeId n, const Observation& z, const Observation& next) const;
  void set_gamma(NodeId n, const Observation& z, Choice c);
  void set_delta(NodeId n, const Observation& z, const Observation& next, NodeId to);
  bool erase_delta(NodeId n, const Observation& z, const Observation& next);

  std::size_t gamma_size() const;
  std::size_t delta_size() const;

  /// Human-readable label of a choice ("up", "skip", "0.300:a, 0.700:b").
  std::string choice_name(const Choice& c) const;
};

/// Posterior-aware finite-state controller. Never carries skip choices.
struct Fsc : ControllerBody {
  using ControllerBody::ControllerBody;
};

/// Intrinsic checks: node ranges, mixed table integrity and, for Fsc, the
/// absence of skip. Throws ModelError.
void validate(const Fsc& fsc);
/// Checks the controller's action names and gamma enabledness against `model`.
void validate_against(const ControllerBody& c, const Pomdp& model);

/// Per-node tabular gamma_n and delta_n, rows sorted lexicographically.
struct NodeTables {
  struct ActionRow {
    Observation z;
    Choice choice;
    friend bool operator==(const ActionRow&, const ActionRow&) = default;
  };
  struct TransitionRow {
    Observation z;
    Observation next;
    NodeId to;
    friend bool operator==(const TransitionRow&, const TransitionRow&) = default;
  };

  NodeId node = 0;
  std::vector<ActionRow> action_rows;
  std::vector<TransitionRow> transition_rows;

  friend bool operator==(const NodeTables&, const NodeTables&) = default;
};

struct StepOutcome {
  ActionId action;
  NodeId next_node;
  StateId next_state;
  Observation next_observation;
};

/// Single step: a = gamma(n, z); successor drawn from P(s, a); n' = delta(n, z, z').
StepOutcome fsc_step(const Fsc& fsc, const Pomdp& model, NodeId node, StateId state, Rng& rng);
/// Same with an injected successor (and, for mixed choices, an injected action).
StepOutcome fsc_step(const Fsc& fsc, const Pomdp& model, NodeId node, StateId state,
                     StateId successor, std::optional<ActionId> action = std::nullopt);

/// Nodes reached by the (node, observation) product from (init_node, obs(init)).
std::vector<NodeId> reachable_nodes(const Fsc& fsc, const Pomdp& model);

/// Tables of every reachable node. Transition rows are restricted to the
/// (z, z') pairs realisable in the model under the node's choices.
/// Throws ClosureError when a realisable pair at a reachable (node, z) has no
/// delta entry.
std::vector<NodeTables> extract_tables(const Fsc& fsc, const Pomdp& model);

/// Inverse of extract_tables for the rows it keeps.
Fsc fsc_from_tables(const std::vector<NodeTables>& tables, std::size_t num_nodes, NodeId init,
                    std::vector<std::string> actions, std::vector<MixedAction> mixed = {});

/// Product of controller and model as a Markov chain over (state, node)
/// pairs reachable from (init, init_node). Targets are goal states; states
/// where the controller is undefined become absorbing non-goal sinks.
struct ProductChain {
  InducedChain chain;
  std::vector<std::pair<StateId, NodeId>> states;
  std::vector<bool> goal;
  StateId init = 0;
};
ProductChain product_chain(const Fsc& fsc, const Pomdp& model);

enum class EpisodeStatus { target, horizon, trapped, undefined };

struct EpisodeResult {
  EpisodeStatus status = EpisodeStatus::horizon;
  std::size_t steps = 0;
};

inline constexpr std::size_t kDefaultHorizon = 10000;

/// Repeated fsc_step from (init, init_node) until a target is hit, the
/// horizon runs out, an absorbing non-target state is entered or the
/// controller is undefined.
EpisodeResult simulate_episode(const Fsc& fsc, const Pomdp& model, Rng& rng,
                               std::size_t horizon = kDefaultHorizon);

const char* to_string(EpisodeStatus s);

}  // namespace dtfsc
