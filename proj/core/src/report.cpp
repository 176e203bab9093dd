#include "qlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace qlab {

bool Report::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  // Shortest representation that round-trips, tried in increasing precision.
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  os << "experiment,n,params_json,measured,bound,stderr,tolerance,pass\n";
  for (const auto& r : rows) {
    std::string params = r.params_json;
    // CSV-quote the JSON cell.
    std::string quoted = "\"";
    for (char c : params) {
      if (c == '"') quoted += "\"\"";
      else quoted += c;
    }
    quoted += "\"";
    os << r.experiment << ',' << r.n << ',' << quoted << ',' << format_double(r.measured)
       << ',' << (r.bound ? format_double(*r.bound) : std::string("n/a")) << ','
       << format_double(r.stderr_value) << ',' << format_double(r.tolerance) << ','
       << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string Report::to_json() const {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << "  {\"experiment\":\"" << json_escape(r.experiment) << "\",\"n\":" << r.n
       << ",\"params\":" << (r.params_json.empty() ? "{}" : r.params_json)
       << ",\"measured\":" << format_double(r.measured) << ",\"bound\":"
       << (r.bound ? format_double(*r.bound) : std::string("null"))
       << ",\"stderr\":" << format_double(r.stderr_value)
       << ",\"tolerance\":" << format_double(r.tolerance)
       << ",\"pass\":" << (r.pass ? "true" : "false") << "}"
       << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  os << "]\n";
  return os.str();
}

}  // namespace qlab
