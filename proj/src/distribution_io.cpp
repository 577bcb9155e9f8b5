#include "steinvar/distribution.hpp"

#include "steinvar/errors.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace steinvar {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& message) { fail(ErrorCode::ValidationError, message); }

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

/// Canonical parameter names per family, in positional order, with aliases.
struct FamilyShape {
  std::vector<std::string> names;
  std::map<std::string, std::string> aliases;
};

const std::map<std::string, FamilyShape>& shapes() {
  static const std::map<std::string, FamilyShape> table = {
      {"normal", {{"mu", "sigma2"}, {{"mean", "mu"}, {"μ", "mu"}, {"variance", "sigma2"}, {"σ2", "sigma2"}, {"σ²", "sigma2"}}}},
      {"beta", {{"alpha", "beta"}, {{"α", "alpha"}, {"a", "alpha"}, {"β", "beta"}, {"b", "beta"}}}},
      {"gamma", {{"alpha", "beta"}, {{"shape", "alpha"}, {"α", "alpha"}, {"scale", "beta"}, {"β", "beta"}}}},
      {"laplace", {{"mu", "b"}, {{"location", "mu"}, {"μ", "mu"}, {"scale", "b"}}}},
      {"binomial", {{"n", "p"}, {{"trials", "n"}, {"prob", "p"}}}},
      {"poisson", {{"lambda"}, {{"λ", "lambda"}, {"rate", "lambda"}}}},
      {"hypergeometric", {{"N", "K", "n"}, {{"population", "N"}, {"successes", "K"}, {"draws", "n"}}}},
  };
  return table;
}

std::map<std::string, double> canonical_params(const std::string& family, const std::vector<std::string>& positional,
                                               const std::vector<std::pair<std::string, double>>& named) {
  const auto it = shapes().find(family);
  if (it == shapes().end()) bad("unknown distribution family '" + family + "'");
  const FamilyShape& shape = it->second;
  std::map<std::string, double> out;
  if (positional.size() > shape.names.size()) bad("too many parameters for " + family);
  for (std::size_t i = 0; i < positional.size(); ++i) {
    try {
      out[shape.names[i]] = std::stod(positional[i]);
    } catch (const std::exception&) {
      bad("cannot parse parameter '" + positional[i] + "'");
    }
  }
  for (const auto& [raw, value] : named) {
    std::string key = raw;
    if (auto a = shape.aliases.find(key); a != shape.aliases.end()) key = a->second;
    if (family != "hypergeometric") {
      key = lower(key);
      if (auto a = shape.aliases.find(key); a != shape.aliases.end()) key = a->second;
    }
    if (std::find(shape.names.begin(), shape.names.end(), key) == shape.names.end()) {
      bad("unknown parameter '" + raw + "' for " + family);
    }
    out[key] = value;
  }
  return out;
}

double need(const std::map<std::string, double>& p, const std::string& key, const std::string& family) {
  const auto it = p.find(key);
  if (it == p.end()) bad(family + " requires parameter '" + key + "'");
  return it->second;
}

long need_integer(const std::map<std::string, double>& p, const std::string& key, const std::string& family) {
  const double v = need(p, key, family);
  if (v != std::floor(v)) bad(family + " parameter '" + key + "' must be an integer");
  return static_cast<long>(v);
}

BuiltinFamily make_family(const std::string& family, const std::map<std::string, double>& p) {
  auto get = [&](const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
  };
  if (family == "normal") return Normal{get("mu", 0.0), get("sigma2", 1.0)};
  if (family == "beta") return Beta{need(p, "alpha", family), need(p, "beta", family)};
  if (family == "gamma") return Gamma{need(p, "alpha", family), need(p, "beta", family)};
  if (family == "laplace") return Laplace{get("mu", 0.0), get("b", 1.0)};
  if (family == "binomial") return Binomial{need_integer(p, "n", family), need(p, "p", family)};
  if (family == "poisson") return Poisson{need(p, "lambda", family)};
  if (family == "hypergeometric") {
    return Hypergeometric{need_integer(p, "N", family), need_integer(p, "K", family), need_integer(p, "n", family)};
  }
  bad("unknown distribution family '" + family + "'");
}

double support_end(const json& v) {
  if (v.is_null()) return kInf;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = lower(v.get<std::string>());
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
  }
  bad("support ends must be numbers, \"inf\" or \"-inf\"");
}

Distribution custom_from_json(const json& c, const QuadratureConfig& cfg) {
  if (!c.contains("support") || !c["support"].is_array() || c["support"].size() != 2) {
    bad("custom target needs \"support\": [a, b]");
  }
  double a = support_end(c["support"][0]);
  double b = support_end(c["support"][1]);
  if (c["support"][0].is_null()) a = -kInf;
  const std::string measure = lower(c.value("measure", std::string("lebesgue")));
  if (measure != "lebesgue" && measure != "counting") bad("measure must be \"lebesgue\" or \"counting\"");
  if (!c.contains("density_table") || !c["density_table"].is_array()) bad("custom target needs \"density_table\"");
  std::vector<std::pair<double, double>> rows;
  for (const auto& row : c["density_table"]) {
    if (row.is_array() && row.size() == 2) {
      rows.emplace_back(row[0].get<double>(), row[1].get<double>());
    } else if (row.is_object()) {
      rows.emplace_back(row.at("x").get<double>(), row.at("p").get<double>());
    } else {
      bad("density_table rows must be [x, p] pairs");
    }
  }
  if (rows.empty()) bad("density_table is empty");
  CustomOptions opts;
  opts.label = c.value("label", std::string("custom"));
  opts.quadrature = cfg;
  std::sort(rows.begin(), rows.end());

  if (measure == "counting") {
    const SupportSpec s = make_support(a, b, MeasureKind::Counting);
    const long lo = static_cast<long>(rows.front().first);
    const long hi = static_cast<long>(rows.back().first);
    if (!s.contains(static_cast<double>(lo)) || !s.contains(static_cast<double>(hi))) {
      bad("density_table points must be integers inside the support");
    }
    std::vector<double> masses(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [x, p] : rows) {
      if (x != std::floor(x)) bad("counting density_table points must be integers");
      masses[static_cast<std::size_t>(static_cast<long>(x) - lo)] = p;
    }
    return make_lattice(lo, std::move(masses), opts);
  }
  make_support(a, b, MeasureKind::Lebesgue);
  if (rows.front().first < a || rows.back().first > b) bad("density_table points must lie inside the support");
  if (rows.front().first != a) rows.insert(rows.begin(), {a, 0.0});
  if (rows.back().first != b) rows.emplace_back(b, 0.0);
  if (!std::isfinite(a) || !std::isfinite(b)) bad("piecewise-linear densities need a bounded support");
  return make_piecewise_linear(std::move(rows), opts);
}

}  // namespace

Distribution distribution_from_json(const json& spec, const QuadratureConfig& cfg) {
  if (!spec.is_object()) bad("distribution spec must be a JSON object");
  if (spec.contains("custom")) return custom_from_json(spec["custom"], cfg);
  if (!spec.contains("family")) bad("distribution spec needs \"family\" or \"custom\"");
  const std::string family = lower(spec["family"].get<std::string>());
  std::vector<std::string> positional;
  std::vector<std::pair<std::string, double>> named;
  if (spec.contains("params")) {
    const json& p = spec["params"];
    if (p.is_array()) {
      for (const auto& v : p) positional.push_back(v.dump());
    } else if (p.is_object()) {
      for (const auto& [k, v] : p.items()) {
        if (!v.is_number()) bad("parameter '" + k + "' must be numeric");
        named.emplace_back(k, v.get<double>());
      }
    } else {
      bad("\"params\" must be an object or an array");
    }
  }
  return make_builtin(make_family(family, canonical_params(family, positional, named)));
}

Distribution parse_distribution(const std::string& text, const QuadratureConfig& cfg) {
  const std::string spec = trim(text);
  if (spec.empty()) bad("empty distribution spec");
  if (spec.front() == '{') {
    try {
      return distribution_from_json(json::parse(spec), cfg);
    } catch (const json::exception& e) {
      bad(std::string("invalid JSON distribution spec: ") + e.what());
    }
  }
  if (std::filesystem::exists(spec)) {
    std::ifstream in(spec);
    try {
      return distribution_from_json(json::parse(in), cfg);
    } catch (const json::exception& e) {
      bad("invalid JSON in " + spec + ": " + e.what());
    }
  }
  const auto colon = spec.find(':');
  const std::string family = lower(trim(spec.substr(0, colon)));
  std::vector<std::string> positional;
  std::vector<std::pair<std::string, double>> named;
  if (colon != std::string::npos) {
    std::stringstream in(spec.substr(colon + 1));
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        if (!named.empty()) bad("positional parameters must come before named ones");
        positional.push_back(item);
        continue;
      }
      const std::string key = trim(item.substr(0, eq));
      try {
        named.emplace_back(key, std::stod(item.substr(eq + 1)));
      } catch (const std::exception&) {
        bad("cannot parse value of '" + key + "'");
      }
    }
  }
  return make_builtin(make_family(family, canonical_params(family, positional, named)));
}

nlohmann::json family_to_json(const BuiltinFamily& family) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Normal>) return {{"family", "normal"}, {"params", {{"mu", p.mean}, {"sigma2", p.variance}}}};
        if constexpr (std::is_same_v<T, Beta>) return {{"family", "beta"}, {"params", {{"alpha", p.alpha}, {"beta", p.beta}}}};
        if constexpr (std::is_same_v<T, Gamma>) return {{"family", "gamma"}, {"params", {{"alpha", p.shape}, {"beta", p.scale}}}};
        if constexpr (std::is_same_v<T, Laplace>) return {{"family", "laplace"}, {"params", {{"mu", p.location}, {"b", p.scale}}}};
        if constexpr (std::is_same_v<T, Binomial>) return {{"family", "binomial"}, {"params", {{"n", p.trials}, {"p", p.prob}}}};
        if constexpr (std::is_same_v<T, Poisson>) return {{"family", "poisson"}, {"params", {{"lambda", p.rate}}}};
        if constexpr (std::is_same_v<T, Hypergeometric>) {
          return {{"family", "hypergeometric"}, {"params", {{"N", p.population}, {"K", p.successes}, {"n", p.draws}}}};
        }
      },
      family);
}

}  // namespace steinvar
