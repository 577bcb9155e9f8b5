#include "cli.hpp"

#include "steinvar/bounds.hpp"
#include "steinvar/errors.hpp"
#include "steinvar/grid.hpp"
#include "steinvar/report_io.hpp"
#include "steinvar/representations.hpp"
#include "steinvar/stein_factors.hpp"
#include "steinvar/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace steinvar::cli {

using nlohmann::json;

namespace {

struct Emitted {
  json report;
  CsvTable table;
  bool property_ok = true;
  std::string text_csv;  // used instead of `table` when the rows carry strings
};

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ValidationError, what);
}

Shift shift_for(const Distribution& dist, const std::string& text) {
  if (text.empty()) return dist.is_discrete() ? Shift::forward() : Shift::differential();
  return parse_shift(text);
}

Execution exec_of(const RunSpec& s) { return s.serial ? Execution::Serial : Execution::Parallel; }

std::vector<double> grid_in_support(const Distribution& dist, const std::string& text) {
  if (text.empty()) return support_grid(dist);
  const auto xs = parse_grid(text);
  const SupportSpec s = dist.support();
  for (double x : xs) {
    require(x >= s.lower && x <= s.upper, "grid point " + format_double(x) + " lies outside the support");
  }
  return xs;
}

json context(const RunSpec& s, const Distribution& dist) {
  return {{"command", s.command}, {"distribution", dist.label()}};
}

Emitted run_bounds(const RunSpec& s) {
  require(!s.dist.empty() && !s.f.empty(), "bounds needs --dist and --f");
  const Distribution dist = parse_distribution(s.dist);
  const Shift ell = shift_for(dist, s.ell);
  const TestFunction f = parse_test_function(s.f);
  std::optional<TestFunction> c, h;
  if (!s.c.empty()) c = parse_test_function(s.c);
  if (!s.h.empty()) h = parse_test_function(s.h);
  const BoundReport r = klaassen_bounds(dist, ell, f, c, h);
  Emitted e{r, to_csv(r), r.lower_holds && r.upper_holds};
  e.report.update(context(s, dist));
  e.report["function"] = f.label();
  e.report["ell"] = to_string(ell);
  return e;
}

Emitted run_expand(const RunSpec& s) {
  require(!s.dist.empty() && !s.g.empty(), "expand needs --dist and --g");
  require(s.n >= 1, "expand needs --n >= 1");
  const Distribution dist = parse_distribution(s.dist);
  ShiftSequence ells;
  if (!s.ells.empty()) {
    ells = parse_shift_sequence(s.ells);
    require(static_cast<int>(ells.size()) >= s.n, "--ells needs at least n entries");
  } else {
    ells.assign(static_cast<std::size_t>(s.n), shift_for(dist, s.ell));
  }
  const TestFunction g = parse_test_function(s.g);
  ExpansionOptions options;
  if (s.monte_carlo) options.monte_carlo = MonteCarloConfig{s.seed, 200'000};
  const ExpansionReport r = variance_expansion(dist, g, s.n, ells, options);
  bool ok = true;
  for (bool b : r.sandwich_holds) ok = ok && b;
  Emitted e{r, to_csv(r), ok};
  e.report.update(context(s, dist));
  e.report["function"] = g.label();
  json seq = json::array();
  for (Shift l : ells) seq.push_back(to_string(l));
  e.report["ells"] = seq;
  return e;
}

Emitted run_kernel(const RunSpec& s) {
  require(!s.dist.empty(), "kernel needs --dist");
  const Distribution dist = parse_distribution(s.dist);
  const Shift ell = shift_for(dist, s.ell);
  require_compatible(ell, dist.measure());
  const auto grid = grid_in_support(dist, s.grid);
  const auto xs = s.x.empty() ? grid : grid_in_support(dist, s.x);
  Emitted e;
  e.table.columns = {"x", "x_prime", "K", "K_over_p_x"};
  json rows = json::array();
  for (double x : xs) {
    const double p = dist.pdf(x);
    require(p > 0.0, "density vanishes at reference point " + format_double(x));
    const auto k = evaluate([&](double y) { return kernel_K(dist, ell, x, y); }, grid, exec_of(s));
    json ks = json::array();
    json ratio = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      e.table.rows.push_back({x, grid[i], k[i], k[i] / p});
      ks.push_back(k[i]);
      ratio.push_back(k[i] / p);
    }
    rows.push_back({{"x", x}, {"K", ks}, {"K_over_p_x", ratio}});
  }
  e.report = context(s, dist);
  e.report["kind"] = "kernel";
  e.report["ell"] = to_string(ell);
  e.report["x_prime"] = grid;
  e.report["rows"] = rows;
  return e;
}

Emitted run_factors(const RunSpec& s) {
  require(!s.dist.empty(), "factors needs --dist");
  const Distribution dist = parse_distribution(s.dist);
  const Shift ell = shift_for(dist, s.ell);
  require_compatible(ell, dist.measure());
  const auto grid = grid_in_support(dist, s.grid);
  const FactorProfile r = factor_profile(dist, ell, grid, exec_of(s));
  Emitted e{r, to_csv(r), true};
  e.report.update(context(s, dist));
  e.report["ell"] = to_string(ell);
  return e;
}

Emitted run_verify(const RunSpec& s, std::ostream& err) {
  const VerifyOptions options{s.seed, exec_of(s)};
  std::vector<CheckResult> all = acceptance_suite(options);
  const auto more = invariant_suite(options);
  all.insert(all.end(), more.begin(), more.end());
  Emitted e;
  e.report = {{"command", "verify"}, {"kind", "verify"}, {"seed", s.seed}, {"checks", all}};
  std::ostringstream csv;
  csv << "id,passed,worst,threshold,seconds,cases\n";
  for (const auto& r : all) {
    err << format_check(r) << '\n';
    e.property_ok = e.property_ok && r.passed;
    csv << r.id << ',' << (r.passed ? 1 : 0) << ',' << format_double(r.worst) << ',' << format_double(r.threshold)
        << ',' << format_double(r.seconds) << ',' << r.cases << '\n';
  }
  e.text_csv = csv.str();
  e.report["passed"] = e.property_ok;
  return e;
}

bool is_validation(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter:
    case ErrorCode::ValidationError:
    case ErrorCode::UnsupportedSupport:
    case ErrorCode::NotNormalized:
    case ErrorCode::MissingDerivative:
    case ErrorCode::UnsupportedOrder: return true;
    default: return false;
  }
}

void write(const RunSpec& s, const Emitted& e, std::ostream& out) {
  if (s.output == Output::Json) {
    out << e.report.dump(2) << '\n';
  } else if (!e.text_csv.empty()) {
    out << e.text_csv;
  } else {
    write_csv(out, e.table);
  }
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  if (!spec.out.empty()) {
    file.open(spec.out);
    if (!file) {
      err << "cannot open " << spec.out << " for writing\n";
      return kExitValidation;
    }
  }
  std::ostream& sink = spec.out.empty() ? out : file;
  try {
    Emitted e;
    if (spec.command == "bounds") {
      e = run_bounds(spec);
    } else if (spec.command == "expand") {
      e = run_expand(spec);
    } else if (spec.command == "kernel") {
      e = run_kernel(spec);
    } else if (spec.command == "factors") {
      e = run_factors(spec);
    } else if (spec.command == "verify") {
      e = run_verify(spec, err);
    } else {
      fail(ErrorCode::ValidationError, "unknown command '" + spec.command + "'");
    }
    write(spec, e, sink);
    return e.property_ok ? kExitOk : kExitProperty;
  } catch (const Error& ex) {
    const json report = {{"command", spec.command},
                         {"kind", "error"},
                         {"errors", json::array({{{"code", std::string(to_string(ex.code()))}, {"message", ex.what()}}})}};
    if (spec.output == Output::Json) sink << report.dump(2) << '\n';
    err << ex.what() << '\n';
    return is_validation(ex.code()) ? kExitValidation : kExitProperty;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stein operators, kernels and variance bounds"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  RunSpec spec;
  std::string output = "json";
  const std::map<std::string, Output> outputs{{"json", Output::Json}, {"csv", Output::Csv}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--dist", spec.dist, "inline family:params, JSON object, or JSON file");
    sub->add_option("--ell", spec.ell, "shift: +1, -1 or 0");
    sub->add_option("--output", output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", spec.out, "write to a file instead of stdout");
    sub->add_option("--seed", spec.seed, "seed for sampled checks");
    sub->add_flag("--serial", spec.serial, "use the serial grid kernels");
  };
  auto* bounds = app.add_subcommand("bounds", "Klaassen lower and upper variance bounds");
  common(bounds);
  bounds->add_option("--f", spec.f, "test function")->required();
  bounds->add_option("--c", spec.c, "weight for the lower bound (default L(id))");
  bounds->add_option("--h", spec.h, "standardizer for the upper bound (default id)");
  auto* expand = app.add_subcommand("expand", "variance expansion terms and partial sums");
  common(expand);
  expand->add_option("--g", spec.g, "test function")->required();
  expand->add_option("--n", spec.n, "number of terms")->required();
  expand->add_option("--ells", spec.ells, "shift sequence, e.g. +1,-1,+1");
  expand->add_flag("--mc", spec.monte_carlo, "also estimate R_n by Monte Carlo");
  auto* kernel = app.add_subcommand("kernel", "K(x, x')/p(x) on a grid");
  common(kernel);
  kernel->add_option("--x", spec.x, "reference points (grid syntax); defaults to --grid");
  kernel->add_option("--grid", spec.grid, "a:b:step or comma list");
  auto* factors = app.add_subcommand("factors", "Stein factor R(x) on a grid");
  common(factors);
  factors->add_option("--grid", spec.grid, "a:b:step or comma list");
  auto* verify = app.add_subcommand("verify", "acceptance and invariant suites");
  verify->add_option("--output", output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--out", spec.out, "write to a file instead of stdout");
  verify->add_option("--seed", spec.seed, "seed for sampled checks");
  verify->add_flag("--serial", spec.serial, "use the serial grid kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }
  spec.command = app.get_subcommands().front()->get_name();
  spec.output = outputs.at(output);
  return run(spec, out, err);
}

}  // namespace steinvar::cli
