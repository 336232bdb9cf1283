#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dtfsc/dt.hpp"
#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"
#include "dtfsc/random.hpp"
#include "dtfsc/skip.hpp"

namespace dtfsc {

/// Controller whose per-node action mapping and transition function are
/// decision trees over observation features.
///
/// Action-tree leaves carry an index into `action_labels`; transition-tree
/// leaves carry node ids. Transition trees read the current observation
/// followed by the next one (`transition_layout`).
struct DtFsc {
  enum class Variant : std::uint8_t { plain, skip };

  struct NodeTrees {
    NodeId node = 0;
    DecisionTree action_tree;
    DecisionTree transition_tree;

    friend bool operator==(const NodeTrees&, const NodeTrees&) = default;
  };

  Variant variant = Variant::plain;
  std::size_t num_nodes = 1;
  NodeId init_node = 0;
  std::vector<FeatureSpec> features;
  std::vector<std::string> actions;
  std::vector<MixedAction> mixed;
  std::vector<Choice> action_labels;
  /// Sorted by node id; only nodes reachable in the source controller.
  std::vector<NodeTrees> nodes;

  const NodeTrees* find(NodeId n) const;
  /// Display name of an action-tree label.
  std::string label_name(std::uint32_t label) const;

  friend bool operator==(const DtFsc&, const DtFsc&) = default;
};

const char* to_string(DtFsc::Variant v);

/// Observation features followed by the same features with a prime.
std::vector<FeatureSpec> transition_layout(const std::vector<FeatureSpec>& features);

/// Checks node ranges, tree structure and label ranges. Descent of skip
/// labels is checked during execution. Throws ModelError.
void validate(const DtFsc& dt);

struct BuildOptions {
  LearnOptions learn;
  /// Worker threads for per-node learning; the result does not depend on it.
  unsigned jobs = 1;
};

/// Learns one action tree from gamma_n and one transition tree from delta_n
/// for every reachable node.
DtFsc build_dtfsc(const Fsc& fsc, const Pomdp& model, const BuildOptions& options = {});
DtFsc build_dtfsc(const SkipFsc& sf, const Pomdp& model, const BuildOptions& options = {});

/// Datasets fed to the learner for one node's tables.
Dataset action_dataset(const NodeTables& t, const std::vector<FeatureSpec>& features,
                       const std::vector<Choice>& labels, const ControllerBody& c);
Dataset transition_dataset(const NodeTables& t, const std::vector<FeatureSpec>& features,
                           std::size_t num_nodes);

struct DtStepResult {
  StepOutcome outcome;
  std::vector<NodeId> trace;
};

/// One step of the tree controller; for the skip variant, skip labels are first resolved through
/// the transition tree on (z, z).
DtStepResult dtfsc_step(const DtFsc& dt, const Pomdp& model, NodeId node, StateId state, Rng& rng);
DtStepResult dtfsc_step(const DtFsc& dt, const Pomdp& model, NodeId node, StateId state,
                        StateId successor, std::optional<ActionId> action = std::nullopt);

EpisodeResult simulate_episode(const DtFsc& dt, const Pomdp& model, Rng& rng,
                               std::size_t horizon = kDefaultHorizon);

struct FaithfulVerdict {
  bool equal = true;
  NodeId node = 0;
  /// "action" or "transition".
  std::string tree;
  std::vector<Value> input;
  std::string expected;
  std::string actual;

  std::string to_string() const;
};

/// Replays every row of the source controller's tables through the trees.
/// Inputs outside the tables are don't-cares and never checked.
FaithfulVerdict check_faithful(const Fsc& fsc, const DtFsc& dt, const Pomdp& model);
FaithfulVerdict check_faithful(const SkipFsc& sf, const DtFsc& dt, const Pomdp& model);

/// Sum of action-tree sizes and of transition-tree sizes over all nodes.
std::size_t action_tree_total(const DtFsc& dt);
std::size_t transition_tree_total(const DtFsc& dt);

}  // namespace dtfsc
