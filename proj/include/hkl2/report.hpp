#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hkl2/core/error.hpp"
#include "hkl2/core/format.hpp"

// Verification records and their JSON / CSV renderings. Field order is fixed:
// suite, check, anchor, source, comparison, measured, expected, tolerance, pass.

namespace hkl2::report {

/// How measured relates to expected: le (measured <= expected + tolerance),
/// ge (measured >= expected - tolerance), near (|measured - expected| <=
/// tolerance) and eq (exact equality, used for counts and dimensions).
enum class Comparison { le, ge, near, eq };

/// Where the expected value comes from.
enum class Source { reference_value, oracle, identity, plumbing };

inline const char* comparison_name(Comparison c) {
  switch (c) {
  case Comparison::le: return "le";
  case Comparison::ge: return "ge";
  case Comparison::near: return "near";
  case Comparison::eq: return "eq";
  }
  return "";
}

inline const char* source_name(Source s) {
  switch (s) {
  case Source::reference_value: return "reference-value";
  case Source::oracle: return "oracle";
  case Source::identity: return "identity";
  case Source::plumbing: return "plumbing";
  }
  return "";
}

inline Comparison parse_comparison(const std::string& s) {
  for (auto c : {Comparison::le, Comparison::ge, Comparison::near, Comparison::eq})
    if (s == comparison_name(c)) return c;
  throw DomainError("unknown comparison '" + s + "'");
}

inline Source parse_source(const std::string& s) {
  for (auto c : {Source::reference_value, Source::oracle, Source::identity, Source::plumbing})
    if (s == source_name(c)) return c;
  throw DomainError("unknown source '" + s + "'");
}

struct Record {
  std::string suite;
  std::string check;
  std::string anchor;
  Source source = Source::identity;
  Comparison comparison = Comparison::le;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  bool operator==(const Record&) const = default;
};

inline bool evaluate(Comparison c, double measured, double expected, double tolerance) {
  if (std::isnan(measured)) return false;
  switch (c) {
  case Comparison::le: return measured <= expected + tolerance;
  case Comparison::ge: return measured >= expected - tolerance;
  case Comparison::near: return std::abs(measured - expected) <= tolerance;
  case Comparison::eq: return measured == expected;
  }
  return false;
}

/// Collects records for one suite; tolerances of le and near checks are
/// multiplied by tol_scale.
class Recorder {
public:
  Recorder(std::string suite, double tol_scale) : suite_(std::move(suite)), scale_(tol_scale) {
    if (!(tol_scale > 0.0)) throw DomainError("tolerance scale must be positive");
  }

  /// measured <= bound * tol_scale.
  Record& at_most(std::string check, std::string anchor, Source src, double measured, double bound) {
    return add(std::move(check), std::move(anchor), src, Comparison::le, measured, 0.0, bound * scale_);
  }
  /// measured >= bound (orders and counts are not scaled).
  Record& at_least(std::string check, std::string anchor, Source src, double measured, double bound) {
    return add(std::move(check), std::move(anchor), src, Comparison::ge, measured, bound, 0.0);
  }
  Record& near(std::string check, std::string anchor, Source src, double measured, double expected, double tol) {
    return add(std::move(check), std::move(anchor), src, Comparison::near, measured, expected, tol * scale_);
  }
  Record& equal(std::string check, std::string anchor, Source src, double measured, double expected) {
    return add(std::move(check), std::move(anchor), src, Comparison::eq, measured, expected, 0.0);
  }
  Record& flag(std::string check, std::string anchor, Source src, bool ok) {
    return equal(std::move(check), std::move(anchor), src, ok ? 1.0 : 0.0, 1.0);
  }

  const std::vector<Record>& records() const { return records_; }
  std::vector<Record> take() { return std::move(records_); }

private:
  Record& add(std::string check, std::string anchor, Source src, Comparison c, double measured, double expected,
              double tol) {
    Record r{suite_, std::move(check), std::move(anchor), src, c, measured, expected, tol, false};
    r.pass = evaluate(c, measured, expected, tol);
    records_.push_back(std::move(r));
    return records_.back();
  }

  std::string suite_;
  double scale_;
  std::vector<Record> records_;
};

inline bool all_pass(const std::vector<Record>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// JSON

using json = nlohmann::ordered_json;

/// Non-finite values become strings so the document stays valid JSON.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw DomainError("bad numeric field '" + s + "'");
}

inline json to_json(const Record& r) {
  return {{"suite", r.suite},
          {"check", r.check},
          {"anchor", r.anchor},
          {"source", source_name(r.source)},
          {"comparison", comparison_name(r.comparison)},
          {"measured", number(r.measured)},
          {"expected", number(r.expected)},
          {"tolerance", number(r.tolerance)},
          {"pass", r.pass}};
}

inline Record record_from_json(const json& j) {
  Record r;
  r.suite = j.at("suite").get<std::string>();
  r.check = j.at("check").get<std::string>();
  r.anchor = j.at("anchor").get<std::string>();
  r.source = parse_source(j.at("source").get<std::string>());
  r.comparison = parse_comparison(j.at("comparison").get<std::string>());
  r.measured = number_from(j.at("measured"));
  r.expected = number_from(j.at("expected"));
  r.tolerance = number_from(j.at("tolerance"));
  r.pass = j.at("pass").get<bool>();
  return r;
}

struct RunInfo {
  std::vector<std::string> suites;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
};

inline json to_json(const std::vector<Record>& rs, const RunInfo& info) {
  json records = json::array();
  std::size_t passed = 0;
  for (const auto& r : rs) {
    records.push_back(to_json(r));
    passed += r.pass ? 1 : 0;
  }
  return {{"schema", 1},
          {"suites", info.suites},
          {"seed", info.seed},
          {"tol_scale", number(info.tol_scale)},
          {"summary", {{"records", rs.size()}, {"passed", passed}, {"failed", rs.size() - passed}}},
          {"all_pass", passed == rs.size()},
          {"records", records}};
}

inline std::vector<Record> records_from_json(const json& doc) {
  if (doc.at("schema").get<int>() != 1) throw DomainError("unsupported report schema");
  std::vector<Record> out;
  for (const auto& j : doc.at("records")) out.push_back(record_from_json(j));
  return out;
}

inline void write_json(std::ostream& os, const std::vector<Record>& rs, const RunInfo& info) {
  if (rs.empty()) throw DomainError("report has no records");
  os << to_json(rs, info).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline const char* csv_header = "suite,check,anchor,source,comparison,measured,expected,tolerance,pass";

inline void write_csv(std::ostream& os, const std::vector<Record>& rs) {
  if (rs.empty()) throw DomainError("report has no records");
  os << csv_header << "\n";
  for (const auto& r : rs)
    os << csv_field(r.suite) << "," << csv_field(r.check) << "," << csv_field(r.anchor) << ","
       << source_name(r.source) << "," << comparison_name(r.comparison) << "," << format_double(r.measured) << ","
       << format_double(r.expected) << "," << format_double(r.tolerance) << "," << (r.pass ? "true" : "false")
       << "\n";
}

} // namespace hkl2::report
