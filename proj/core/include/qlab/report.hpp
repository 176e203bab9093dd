#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qlab {

/// Fixed, versioned row schema shared by the CLI and the acceptance suite:
/// experiment, n, params_json, measured, bound, stderr, tolerance, pass.
struct ReportRow {
  std::string experiment;
  int n = 0;
  std::string params_json;  // compact JSON object; carries distinguisher ids,
                            // p_real / p_ideal and similar per-row extras
  double measured = 0.0;
  std::optional<double> bound;  // absent renders as "n/a"
  double stderr_value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<ReportRow> rows;

  bool all_pass() const;
  std::string to_csv() const;
  std::string to_json() const;
};

/// Deterministic shortest-round-trip formatting ("%.17g" capped); identical
/// inputs serialize byte-identically.
std::string format_double(double v);

/// Minimal JSON string escaping for row payloads.
std::string json_escape(const std::string& s);

}  // namespace qlab
