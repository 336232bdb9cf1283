#pragma once

#include <span>
#include <string>
#include <vector>

#include "dtfsc/dt.hpp"
#include "dtfsc/dtfsc.hpp"
#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"
#include "dtfsc/skip.hpp"

namespace dtfsc {

/// Graphviz rendering of a tree: inner nodes "name=v" or "name<=v", edges
/// "true"/"false", leaves named by `label_names`.
std::string tree_dot(const DecisionTree& tree, std::span<const FeatureSpec> layout,
                     const std::vector<std::string>& label_names, const std::string& graph_name = "tree");

/// Node graph of a controller. One edge per (node, successor) pair, labelled
/// with the number of delta entries behind it. For skip controllers, edges
/// of delta(n, z, z) with gamma(n, z) = skip are dashed.
std::string controller_dot(const Fsc& fsc);
std::string controller_dot(const SkipFsc& sf);

/// Controller nodes plus one cluster per referenced tree. Node n has an
/// action tree "A<n>" and a transition tree "T<n>"; an edge n -> m is
/// labelled "T<n>" when m is a leaf of T<n>. In the skip variant a node whose
/// action tree can answer skip gets a dashed "skip" edge to n - 1.
std::string dtfsc_dot(const DtFsc& dt);

}  // namespace dtfsc
