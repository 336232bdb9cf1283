#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"
#include "dtfsc/skip.hpp"

namespace dtfsc {

struct IterationPolicy {
  /// Choice for every observation that is neither won nor a target observation.
  StationaryObsPolicy policy;
  /// Observations that become winning under `policy`, sorted.
  std::vector<Observation> won;
};

/// Lexicographically first policy (observations by id, actions by id) that
/// wins at least one observation outside `won`, where states carrying a won
/// or target observation count as reached. Returns nullopt when none exists.
std::optional<IterationPolicy> find_iteration_policy(const Pomdp& model,
                                                     const std::set<Observation>& won);

struct SynthResult {
  Fsc fsc;
  IterationIndex index;
  /// Iterations run before pruning unreachable nodes.
  std::size_t iterations = 0;
  /// Search nodes visited over all iterations.
  std::size_t search_nodes = 0;
};

/// Iterates find_iteration_policy until obs(init) is won. Node i acts by
/// the i-th policy on the observations it can meet and switches to node
/// i_z' as soon as an observation z' won earlier shows up. Unreachable nodes
/// are pruned and the rest renumbered in iteration order; the init node is
/// the last one. Throws SynthesisError when the search gets stuck.
SynthResult synthesize(const Pomdp& model);

}  // namespace dtfsc
