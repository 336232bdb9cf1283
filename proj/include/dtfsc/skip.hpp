#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"
#include "dtfsc/random.hpp"

namespace dtfsc {

/// Controller whose action mapping may output `skip`. A skip at (n, z)
/// moves to delta(n, z, z) < n before any action is taken.
struct SkipFsc : ControllerBody {
  using ControllerBody::ControllerBody;
};

/// Intrinsic checks, including strict descent of every skip. Throws ModelError.
void validate(const SkipFsc& sf);

/// Plain controller seen as a skip controller with no skip labels.
SkipFsc embed(const Fsc& fsc);

/// i_z for every observation won during synthesis. Target observations are
/// not listed.
struct IterationIndex {
  std::map<Observation, NodeId> iteration;

  friend bool operator==(const IterationIndex&, const IterationIndex&) = default;
};

struct ChainWitness {
  NodeId node;        // j
  Observation won;    // z with i_z < j
  Observation from;   // current observation of the offending entry
  std::optional<NodeId> found;  // empty when the entry is missing
};

/// First entry breaking the chain shape: for every indexed z, every
/// j > i_z and every current observation z' in the domain of gamma(n_j),
/// delta(n_j, z', z) must be n_{i_z}.
std::optional<ChainWitness> find_chain_violation(const Fsc& fsc, const IterationIndex& idx);
/// Throws ChainViolationError naming the witness.
void verify_chain_property(const Fsc& fsc, const IterationIndex& idx);

/// Replaces every long jump (n_j, z', z) -> n_{i_z} by a jump to n_{j-1} and
/// adds single-step skips gamma(n_k, z) = skip, delta(n_k, z, z) = n_{k-1}
/// for i_z < k < j. Throws ChainViolationError if the chain shape does not
/// hold or a skip would overwrite an existing entry.
SkipFsc to_skip_fsc(const Fsc& fsc, const IterationIndex& idx);

struct SkipStepResult {
  StepOutcome outcome;
  /// Nodes left through skips, in order.
  std::vector<NodeId> trace;
};

SkipStepResult skip_step(const SkipFsc& sf, const Pomdp& model, NodeId node, StateId state, Rng& rng);
SkipStepResult skip_step(const SkipFsc& sf, const Pomdp& model, NodeId node, StateId state,
                         StateId successor, std::optional<ActionId> action = std::nullopt);

std::vector<NodeId> reachable_nodes(const SkipFsc& sf, const Pomdp& model);
/// As for Fsc; a skip row at (n, z) contributes the single transition row (z, z).
std::vector<NodeTables> extract_tables(const SkipFsc& sf, const Pomdp& model);
ProductChain product_chain(const SkipFsc& sf, const Pomdp& model);
EpisodeResult simulate_episode(const SkipFsc& sf, const Pomdp& model, Rng& rng,
                               std::size_t horizon = kDefaultHorizon);

/// One step of a counterexample run: the observation seen and the action
/// both controllers agreed on.
struct TraceStep {
  Observation z;
  ActionId action;
};

struct EquivVerdict {
  bool equivalent = true;
  /// Agreed prefix, then the observation where the controllers part ways.
  std::vector<TraceStep> prefix;
  Observation last;
  std::string fsc_choice;
  std::string skip_choice;

  /// Alternating observation/action lines.
  std::string to_string(const Pomdp& model) const;
};

/// Breadth-first search over (state, fsc node, skip node) from the initial
/// triple. Compares the choice of the plain controller with the skip
/// controller's choice after skip resolution, and whether both define the
/// next node. The counterexample is a shortest such run.
EquivVerdict check_equiv(const Fsc& fsc, const SkipFsc& sf, const Pomdp& model);

}  // namespace dtfsc
