#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace wisheig::cli {

enum class Provenance { none, exact, approx, empirical };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::approx: return "approx";
    case Provenance::empirical: return "empirical";
    case Provenance::none: break;
  }
  return "";
}

using Value = std::variant<double, long long, std::string>;

struct Entry {
  std::string key;
  Value value;
};

struct Row {
  std::string label;
  Value value;
  Provenance provenance = Provenance::none;
};

/// Everything one command produced. The parameter echo is enough to rerun the
/// command and get the same rows; wall time is only filled in on request so
/// that equal runs give equal bytes.
struct RunReport {
  std::string command;
  std::vector<Entry> params;
  std::vector<Row> rows;
  std::vector<Entry> diagnostics;
  std::vector<std::string> warnings;
  std::optional<double> wall_seconds;

  void param(std::string key, Value v) { params.push_back({std::move(key), std::move(v)}); }
  void row(std::string label, Value v, Provenance p) { rows.push_back({std::move(label), std::move(v), p}); }
  void diagnostic(std::string key, Value v) { diagnostics.push_back({std::move(key), std::move(v)}); }
  void warn(const std::string& w) {
    for (const auto& seen : warnings)
      if (seen == w) return;
    warnings.push_back(w);
  }
};

// 17 significant digits, so the text reads back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// section,key,value,provenance with one line per parameter, result row,
/// diagnostic and warning.
inline void write_csv(std::ostream& os, const RunReport& r) {
  auto line = [&](const char* section, const std::string& key, const std::string& value, const char* prov) {
    os << section << ',' << csv_field(key) << ',' << csv_field(value) << ',' << prov << '\n';
  };
  os << "section,key,value,provenance\n";
  line("command", "name", r.command, "");
  for (const auto& p : r.params) line("param", p.key, format_value(p.value), "");
  for (const auto& row : r.rows) line("result", row.label, format_value(row.value), to_string(row.provenance));
  for (const auto& d : r.diagnostics) line("diagnostic", d.key, format_value(d.value), "");
  for (const auto& w : r.warnings) line("diagnostic", "warning", w, "");
  if (r.wall_seconds) line("diagnostic", "wall_seconds", format_double(*r.wall_seconds), "");
}

inline nlohmann::ordered_json to_json_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<long long>(&v)) return *i;
  return std::get<std::string>(v);
}

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& p : r.params) j["params"][p.key] = to_json_value(p.value);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"label", row.label}, {"value", to_json_value(row.value)}, {"provenance", to_string(row.provenance)}});
  auto& d = j["diagnostics"] = nlohmann::ordered_json::object();
  for (const auto& e : r.diagnostics) d[e.key] = to_json_value(e.value);
  d["warnings"] = r.warnings;
  if (r.wall_seconds) d["wall_seconds"] = *r.wall_seconds;
  return j;
}

inline void write_json(std::ostream& os, const RunReport& r) { os << to_json(r).dump(2) << '\n'; }

}  // namespace wisheig::cli
