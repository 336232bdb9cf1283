#include "dtfsc/report.hpp"

#include <cstdio>

namespace dtfsc {

namespace {

double ratio(std::size_t rows, std::size_t nodes) {
  return nodes == 0 ? 0.0 : static_cast<double>(rows) / static_cast<double>(nodes);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double MetricsReport::policy_ratio() const { return ratio(policy_rows, policy_dt_nodes); }
double MetricsReport::trans_ratio() const { return ratio(trans_rows, trans_dt_nodes); }

MetricsReport make_report(const std::string& benchmark, const Fsc& fsc, const DtFsc& dt, const Pomdp& model) {
  MetricsReport r;
  r.benchmark = benchmark;
  r.variant = dt.variant;
  const auto tables = extract_tables(fsc, model);
  r.fsc_nodes = tables.size();
  for (const auto& t : tables) {
    r.policy_rows += t.action_rows.size();
    r.trans_rows += t.transition_rows.size();
  }
  r.policy_dt_nodes = action_tree_total(dt);
  r.trans_dt_nodes = transition_tree_total(dt);
  return r;
}

std::string format_ratio(double r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

std::string csv_header() {
  return "benchmark,fsc_nodes,policy_rows,policy_dt_nodes,policy_ratio,trans_rows,trans_dt_nodes,trans_ratio,"
         "variant";
}

std::string csv_row(const MetricsReport& r) {
  return csv_field(r.benchmark) + "," + std::to_string(r.fsc_nodes) + "," + std::to_string(r.policy_rows) + "," +
         std::to_string(r.policy_dt_nodes) + "," + format_ratio(r.policy_ratio()) + "," +
         std::to_string(r.trans_rows) + "," + std::to_string(r.trans_dt_nodes) + "," +
         format_ratio(r.trans_ratio()) + "," + to_string(r.variant);
}

}  // namespace dtfsc
