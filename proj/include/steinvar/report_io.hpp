#pragma once

#include "steinvar/bounds.hpp"
#include "steinvar/stein_factors.hpp"
#include "steinvar/verify.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace steinvar {

void to_json(nlohmann::json& j, const Tolerances& t);
void from_json(const nlohmann::json& j, Tolerances& t);
void to_json(nlohmann::json& j, const BoundReport& r);
void from_json(const nlohmann::json& j, BoundReport& r);
void to_json(nlohmann::json& j, const McEstimate& m);
void from_json(const nlohmann::json& j, McEstimate& m);
void to_json(nlohmann::json& j, const ExpansionReport& r);
void from_json(const nlohmann::json& j, ExpansionReport& r);
void to_json(nlohmann::json& j, const MatrixBoundReport& r);
void from_json(const nlohmann::json& j, MatrixBoundReport& r);
void to_json(nlohmann::json& j, const MatrixCsReport& r);
void from_json(const nlohmann::json& j, MatrixCsReport& r);
void to_json(nlohmann::json& j, const InverseBoundCheck& r);
void from_json(const nlohmann::json& j, InverseBoundCheck& r);
void to_json(nlohmann::json& j, const MillsBounds& r);
void from_json(const nlohmann::json& j, MillsBounds& r);

/// Grid of R^ℓ values; `eval` is not serialized.
void to_json(nlohmann::json& j, const FactorProfile& r);
void from_json(const nlohmann::json& j, FactorProfile& r);

void to_json(nlohmann::json& j, const CheckResult& r);
void from_json(const nlohmann::json& j, CheckResult& r);

/// One row per x; every double printed with 17 significant digits.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& out, const CsvTable& table);
std::string format_double(double v);

CsvTable to_csv(const BoundReport& r);
CsvTable to_csv(const ExpansionReport& r);
CsvTable to_csv(const FactorProfile& r);

}  // namespace steinvar
