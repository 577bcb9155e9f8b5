#include "steinvar/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace steinvar {

using nlohmann::json;

namespace {

// JSON has no infinities or NaN; they travel as strings.
json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
  }
  return j.get<double>();
}

json matrix(const Matrix2& m) {
  return json::array({json::array({number(m[0][0]), number(m[0][1])}), json::array({number(m[1][0]), number(m[1][1])})});
}

Matrix2 matrix(const json& j) {
  Matrix2 m{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m[a][b] = number(j.at(a).at(b));
  }
  return m;
}

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

std::vector<double> numbers(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x));
  return out;
}

}  // namespace

void to_json(json& j, const Tolerances& t) {
  j = {{"abs_tol", number(t.abs_tol)}, {"rel_tol", number(t.rel_tol)}, {"comparison", number(t.comparison)}};
}
void from_json(const json& j, Tolerances& t) {
  t.abs_tol = number(j.at("abs_tol"));
  t.rel_tol = number(j.at("rel_tol"));
  t.comparison = number(j.at("comparison"));
}

void to_json(json& j, const BoundReport& r) {
  j = {{"kind", "bounds"},
       {"lower", number(r.lower)},
       {"upper", number(r.upper)},
       {"variance", number(r.oracle_variance)},
       {"method", r.method},
       {"tolerances", r.tolerances},
       {"lower_holds", r.lower_holds},
       {"upper_holds", r.upper_holds},
       {"lower_tight", r.lower_tight},
       {"upper_tight", r.upper_tight}};
}
void from_json(const json& j, BoundReport& r) {
  r.lower = number(j.at("lower"));
  r.upper = number(j.at("upper"));
  r.oracle_variance = number(j.at("variance"));
  r.method = j.at("method").get<std::string>();
  r.tolerances = j.at("tolerances").get<Tolerances>();
  r.lower_holds = j.at("lower_holds").get<bool>();
  r.upper_holds = j.at("upper_holds").get<bool>();
  r.lower_tight = j.at("lower_tight").get<bool>();
  r.upper_tight = j.at("upper_tight").get<bool>();
}

void to_json(json& j, const McEstimate& m) { j = {{"value", number(m.value)}, {"std_error", number(m.std_error)}}; }
void from_json(const json& j, McEstimate& m) {
  m.value = number(j.at("value"));
  m.std_error = number(j.at("std_error"));
}

void to_json(json& j, const ExpansionReport& r) {
  json sides = json::array();
  for (auto s : r.sandwich) sides.push_back(s == BoundSide::Lower ? "lower" : "upper");
  j = {{"kind", "expansion"},
       {"terms", numbers(r.terms)},
       {"partial_sums", numbers(r.partial_sums)},
       {"variance", number(r.oracle_variance)},
       {"remainder_estimate", number(r.remainder_estimate)},
       {"sandwich", sides},
       {"sandwich_holds", r.sandwich_holds},
       {"tolerance", number(r.tolerance)}};
  if (r.mc_remainder) j["mc_remainder"] = *r.mc_remainder;
}
void from_json(const json& j, ExpansionReport& r) {
  r.terms = numbers(j.at("terms"));
  r.partial_sums = numbers(j.at("partial_sums"));
  r.oracle_variance = number(j.at("variance"));
  r.remainder_estimate = number(j.at("remainder_estimate"));
  r.sandwich.clear();
  for (const auto& s : j.at("sandwich")) r.sandwich.push_back(s.get<std::string>() == "lower" ? BoundSide::Lower : BoundSide::Upper);
  r.sandwich_holds = j.at("sandwich_holds").get<std::vector<bool>>();
  r.tolerance = number(j.at("tolerance"));
  r.mc_remainder.reset();
  if (j.contains("mc_remainder")) r.mc_remainder = j.at("mc_remainder").get<McEstimate>();
}

void to_json(json& j, const MatrixBoundReport& r) {
  j = {{"kind", "olkin_shepp"},
       {"lhs", matrix(r.lhs)},
       {"rhs", matrix(r.rhs)},
       {"diff_min_eigenvalue", number(r.diff_min_eigenvalue)},
       {"det_inequality_slack", number(r.det_inequality_slack)},
       {"tolerance", number(r.tolerance)},
       {"holds", r.holds()}};
}
void from_json(const json& j, MatrixBoundReport& r) {
  r.lhs = matrix(j.at("lhs"));
  r.rhs = matrix(j.at("rhs"));
  r.diff_min_eigenvalue = number(j.at("diff_min_eigenvalue"));
  r.det_inequality_slack = number(j.at("det_inequality_slack"));
  r.tolerance = number(j.at("tolerance"));
}

void to_json(json& j, const MatrixCsReport& r) {
  j = {{"kind", "matrix_cs"},
       {"lhs", matrix(r.lhs)},
       {"rhs", matrix(r.rhs)},
       {"residual", matrix(r.residual)},
       {"identity_error", number(r.identity_error)},
       {"residual_min_eigenvalue", number(r.residual_min_eigenvalue)}};
}
void from_json(const json& j, MatrixCsReport& r) {
  r.lhs = matrix(j.at("lhs"));
  r.rhs = matrix(j.at("rhs"));
  r.residual = matrix(j.at("residual"));
  r.identity_error = number(j.at("identity_error"));
  r.residual_min_eigenvalue = number(j.at("residual_min_eigenvalue"));
}

void to_json(json& j, const InverseBoundCheck& r) {
  j = {{"lhs", number(r.lhs)}, {"rhs", number(r.rhs)}, {"h_sup", number(r.h_sup)}, {"holds", r.holds}};
}
void from_json(const json& j, InverseBoundCheck& r) {
  r.lhs = number(j.at("lhs"));
  r.rhs = number(j.at("rhs"));
  r.h_sup = number(j.at("h_sup"));
  r.holds = j.at("holds").get<bool>();
}

void to_json(json& j, const MillsBounds& r) {
  j = {{"lower1", number(r.lower1)}, {"half_r", number(r.half_r)}, {"R", number(r.R)},
       {"r", number(r.r)},           {"upper", number(r.upper)},   {"chain_holds", r.chain_holds()}};
}
void from_json(const json& j, MillsBounds& r) {
  r.lower1 = number(j.at("lower1"));
  r.half_r = number(j.at("half_r"));
  r.R = number(j.at("R"));
  r.r = number(j.at("r"));
  r.upper = number(j.at("upper"));
}

void to_json(json& j, const FactorProfile& r) {
  j = {{"kind", "factors"},
       {"x", numbers(r.grid)},
       {"R", numbers(r.values)},
       {"sup_on_grid", number(r.sup_on_grid)},
       {"argmax", number(r.argmax)}};
}
void from_json(const json& j, FactorProfile& r) {
  r.grid = numbers(j.at("x"));
  r.values = numbers(j.at("R"));
  r.sup_on_grid = number(j.at("sup_on_grid"));
  r.argmax = number(j.at("argmax"));
  r.eval = {};
}

void to_json(json& j, const CheckResult& r) {
  j = {{"id", r.id},
       {"name", r.name},
       {"passed", r.passed},
       {"worst", number(r.worst)},
       {"threshold", number(r.threshold)},
       {"seconds", number(r.seconds)},
       {"time_limit", number(r.time_limit)},
       {"cases", r.cases},
       {"detail", r.detail}};
}
void from_json(const json& j, CheckResult& r) {
  r.id = j.at("id").get<std::string>();
  r.name = j.at("name").get<std::string>();
  r.passed = j.at("passed").get<bool>();
  r.worst = number(j.at("worst"));
  r.threshold = number(j.at("threshold"));
  r.seconds = number(j.at("seconds"));
  r.time_limit = number(j.at("time_limit"));
  r.cases = j.at("cases").get<std::size_t>();
  r.detail = j.at("detail").get<std::string>();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

CsvTable to_csv(const BoundReport& r) {
  return {{"lower", "variance", "upper", "lower_holds", "upper_holds"},
          {{r.lower, r.oracle_variance, r.upper, r.lower_holds ? 1.0 : 0.0, r.upper_holds ? 1.0 : 0.0}}};
}

CsvTable to_csv(const ExpansionReport& r) {
  CsvTable t{{"n", "term", "partial_sum", "variance", "is_lower", "holds"}, {}};
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    t.rows.push_back({static_cast<double>(i + 1), r.terms[i], r.partial_sums[i], r.oracle_variance,
                      r.sandwich[i] == BoundSide::Lower ? 1.0 : 0.0, r.sandwich_holds[i] ? 1.0 : 0.0});
  }
  return t;
}

CsvTable to_csv(const FactorProfile& r) {
  CsvTable t{{"x", "R"}, {}};
  for (std::size_t i = 0; i < r.grid.size(); ++i) t.rows.push_back({r.grid[i], r.values[i]});
  return t;
}

}  // namespace steinvar
