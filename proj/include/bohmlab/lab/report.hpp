#ifndef BOHMLAB_LAB_REPORT_HPP
#define BOHMLAB_LAB_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmlab/residual.hpp"

namespace bohmlab::lab {

using json = nlohmann::ordered_json;

/// A check an operation can produce, with its default tolerance.
struct CheckSpec {
  std::string name;
  /// how `value` is measured, e.g. "max", "relative", "max_defect"
  std::string norm;
  double tolerance;
  /// when set, the check also needs an observed convergence order at least this large
  std::optional<double> min_order;
};

/// A value measured by an operation, before it is judged.
struct Measurement {
  std::string name;
  double value;
  std::optional<Refinement> order;
};

struct CheckResult {
  std::string name;
  std::string norm;
  double value = 0.0;
  double tolerance = 0.0;
  std::optional<double> order;
  bool exact = false;
  std::optional<double> min_order;
  bool pass = false;
};

inline CheckResult judge(const CheckSpec& spec, const Measurement& m, double tolerance) {
  CheckResult r;
  r.name = spec.name;
  r.norm = spec.norm;
  r.value = m.value;
  r.tolerance = tolerance;
  r.min_order = spec.min_order;
  if (m.order) {
    r.exact = m.order->exact;
    if (std::isfinite(m.order->order)) r.order = m.order->order;
  }
  r.pass = std::isfinite(m.value) && m.value <= tolerance;
  if (spec.min_order) r.pass = r.pass && m.order && m.order->converges_at(*spec.min_order);
  return r;
}

struct RunSummary {
  std::string id;
  std::string module;
  std::string operation;
  std::string paper_ref;
  std::string source;
  std::vector<CheckResult> checks;
  /// paths relative to the output directory
  std::vector<std::string> artifacts;
  std::optional<std::string> error;
  double wall_time_s = 0.0;

  bool pass() const {
    return !error && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c.name);
    return out;
  }
};

inline json to_json(const CheckResult& c) {
  json j;
  j["equation"] = c.name;
  j["norm"] = c.norm;
  j["value"] = c.value;
  j["order"] = c.order ? json(*c.order) : json(nullptr);
  j["exact"] = c.exact;
  j["min_order"] = c.min_order ? json(*c.min_order) : json(nullptr);
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  return j;
}

inline json to_json(const RunSummary& s) {
  json j;
  j["id"] = s.id;
  j["module"] = s.module;
  j["operation"] = s.operation;
  j["paper_ref"] = s.paper_ref;
  j["source"] = s.source;
  j["pass"] = s.pass();
  j["checks"] = json::array();
  for (const auto& c : s.checks) j["checks"].push_back(to_json(c));
  j["artifacts"] = s.artifacts;
  j["error"] = s.error ? json(*s.error) : json(nullptr);
  j["wall_time_s"] = s.wall_time_s;
  return j;
}

/// One row per scenario, ordered by id.
inline json suite_json(std::vector<RunSummary> runs, double wall_time_s) {
  std::sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) { return a.id < b.id; });
  json j;
  j["scenarios"] = json::array();
  std::size_t total = 0, failed = 0;
  bool pass = true;
  for (const auto& r : runs) {
    json row;
    row["id"] = r.id;
    row["module"] = r.module;
    row["operation"] = r.operation;
    row["paper_ref"] = r.paper_ref;
    row["pass"] = r.pass();
    row["checks"] = r.checks.size();
    row["failed_checks"] = r.failed();
    row["error"] = r.error ? json(*r.error) : json(nullptr);
    row["wall_time_s"] = r.wall_time_s;
    j["scenarios"].push_back(row);
    total += r.checks.size();
    failed += r.failed().size();
    pass = pass && r.pass();
  }
  j["total_checks"] = total;
  j["failed_checks"] = failed;
  j["pass"] = pass;
  j["wall_time_s"] = wall_time_s;
  return j;
}

/// Removes every "wall_time_s" field, leaving the deterministic part of a report.
inline json without_timing(json j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [key, value] : j.items()) value = without_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = without_timing(value);
  }
  return j;
}

}  // namespace bohmlab::lab

#endif  // BOHMLAB_LAB_REPORT_HPP
