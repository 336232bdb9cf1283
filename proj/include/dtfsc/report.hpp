#pragma once

#include <cstddef>
#include <string>

#include "dtfsc/dtfsc.hpp"
#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"

namespace dtfsc {

/// Table sizes of a controller next to its decision-tree form. Row counts
/// always come from the plain controller's tables; for the skip variant the
/// tree totals are those of the skip-DT-FSC.
struct MetricsReport {
  std::string benchmark;
  std::size_t fsc_nodes = 0;
  std::size_t policy_rows = 0;
  std::size_t policy_dt_nodes = 0;
  std::size_t trans_rows = 0;
  std::size_t trans_dt_nodes = 0;
  DtFsc::Variant variant = DtFsc::Variant::plain;

  /// rows / tree nodes; 0 when there are no tree nodes.
  double policy_ratio() const;
  double trans_ratio() const;
};

/// Sizes over the reachable nodes of `fsc`. `dt` may be the plain DT-FSC of
/// `fsc` or the DT-FSC of its skip form.
MetricsReport make_report(const std::string& benchmark, const Fsc& fsc, const DtFsc& dt, const Pomdp& model);

/// Two-decimal rendering used for ratios.
std::string format_ratio(double r);

/// "benchmark,fsc_nodes,policy_rows,policy_dt_nodes,policy_ratio,trans_rows,trans_dt_nodes,trans_ratio,variant"
std::string csv_header();
/// One CSV line without trailing newline. Benchmark names containing commas
/// or quotes are quoted.
std::string csv_row(const MetricsReport& r);

}  // namespace dtfsc
