#pragma once

#include "steinvar/exact.hpp"
#include "steinvar/lattice.hpp"
#include "steinvar/numerics.hpp"
#include "steinvar/support.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace steinvar {

struct Normal {
  double mean = 0.0;
  double variance = 1.0;
};
struct Beta {
  double alpha = 1.0;
  double beta = 1.0;
};
/// Shape α and scale β; the mean is αβ.
struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};
struct Laplace {
  double location = 0.0;
  double scale = 1.0;
};
struct Binomial {
  long trials = 1;
  double prob = 0.5;
};
struct Poisson {
  double rate = 1.0;
};
/// N items of which K are successes, n drawn without replacement.
struct Hypergeometric {
  long population = 1;
  long successes = 0;
  long draws = 1;
};

using BuiltinFamily = std::variant<Normal, Beta, Gamma, Laplace, Binomial, Poisson, Hypergeometric>;

/// Everything a target needs. Built by the factories below; immutable once
/// wrapped in a Distribution.
struct DistributionModel {
  std::string label;
  std::optional<BuiltinFamily> family;
  SupportSpec support;
  RealFn pdf;
  RealFn log_pdf;
  RealFn cdf;
  RealFn sf;
  RealFn score;  // p'/p, Lebesgue only, may be empty
  // log p(b − t) as a function of t, for densities singular at a finite upper
  // end b where x = b − t cannot resolve small t.
  RealFn upper_log_pdf;
  double mean = 0.0;
  double variance = 0.0;
  Sampler sampler;
  std::vector<double> breakpoints;
  std::optional<LatticeTable<double>> lattice;
  std::optional<LatticeTable<Rational>> exact;
};

class Distribution {
 public:
  explicit Distribution(std::shared_ptr<const DistributionModel> model);

  const std::string& label() const { return m_->label; }
  const std::optional<BuiltinFamily>& family() const { return m_->family; }
  const SupportSpec& support() const { return m_->support; }
  MeasureKind measure() const { return m_->support.measure; }
  bool is_discrete() const { return m_->support.is_discrete(); }

  /// Density (or mass); zero off the support.
  double pdf(double x) const;
  double log_pdf(double x) const;
  /// P(X ≤ x)
  double cdf(double x) const;
  /// P(X > x)
  double sf(double x) const;
  /// p'(x)/p(x) when available.
  std::optional<double> score(double x) const;
  /// Empty unless the density is singular at a finite upper end.
  const RealFn& upper_log_pdf() const { return m_->upper_log_pdf; }
  double mean() const { return m_->mean; }
  double variance() const { return m_->variance; }
  double sample(std::mt19937_64& rng) const { return m_->sampler(rng); }
  double quantile(double q) const;

  /// Points where the density has a kink or jump, plus a centre for doubly
  /// infinite supports; used to split quadrature ranges.
  std::span<const double> breakpoints() const { return m_->breakpoints; }

  /// Counting targets: the (possibly tail-truncated) mass table.
  const LatticeTable<double>& lattice() const;
  /// Exact rational table for finite lattices with rational parameters.
  const std::optional<LatticeTable<Rational>>& exact_lattice() const { return m_->exact; }

  /// Support with infinite lattice ends replaced by the truncation bounds.
  SupportSpec effective_support() const;
  /// True when x lies in S(p) = {p > 0} (interior points for Lebesgue, plus
  /// finite endpoints where the density is finite and positive).
  bool in_support(double x) const;

 private:
  std::shared_ptr<const DistributionModel> m_;
};

Distribution make_builtin(const BuiltinFamily& family);

struct CustomOptions {
  std::string label = "custom";
  QuadratureConfig quadrature{};
  double normalization_tol = 1e-8;
  bool require_normalized = true;
  std::vector<double> breakpoints;
};

/// User supplied target. Missing cdf, mean and variance are filled by
/// quadrature or summation.
Distribution make_custom(const SupportSpec& support, RealFn density, std::optional<RealFn> cdf = std::nullopt,
                         std::optional<RealFn> derivative = std::nullopt, const CustomOptions& options = {});

/// Lattice target from explicit masses on lo, lo+1, ...
Distribution make_lattice(long lo, std::vector<double> masses, const CustomOptions& options = {});
/// Lattice target from exact masses (kept for the rational path).
Distribution make_exact_lattice(long lo, std::vector<Rational> masses, std::string label = "custom");

/// Continuous target with piecewise-linear density through (x, p(x)) nodes.
Distribution make_piecewise_linear(std::vector<std::pair<double, double>> nodes, const CustomOptions& options = {});

struct Diagnostics {
  double normalization_error = 0.0;
  double mean_error = 0.0;
  int cdf_monotonicity_violations = 0;
  double cdf_lower_error = 0.0;
  double cdf_upper_error = 0.0;
  double cdf_accumulation_error = 0.0;
  bool support_consistent = true;
  bool normalized = true;
  std::vector<std::string> notes;

  bool ok() const;
};

Diagnostics validate(const Distribution& dist, const QuadratureConfig& cfg = {});

/// ∫ f p dμ.
Estimate expect(const Distribution& dist, const RealFn& f, const QuadratureConfig& cfg = {},
                std::span<const double> extra_breakpoints = {});
/// ∫_{[lo, hi]} f(y) p(y) e^{−log_scale} dμ(y), with the scaling applied in log space.
Estimate partial_expect(const Distribution& dist, const RealFn& f, double lo, double hi, double log_scale = 0.0,
                        const QuadratureConfig& cfg = {}, std::span<const double> extra_breakpoints = {});
/// ∫_{[lo, hi] ∩ S(p)} f dμ (no density weight).
Estimate measure_integral(const Distribution& dist, const RealFn& f, double lo, double hi,
                          const QuadratureConfig& cfg = {}, std::span<const double> extra_breakpoints = {});

McEstimate mc_expect(const std::function<double(std::span<const double>)>& f, const Distribution& dist,
                     std::size_t arity, const MonteCarloConfig& cfg = {});

/// Smallest-denominator rational that rounds to x (0.2 → 1/5).
Rational to_rational(double x);

/// Builtin from JSON {"family": ..., "params": {...}} or custom
/// {"custom": {"support": [a, b], "measure": ..., "density_table": [[x, p], ...]}}.
Distribution distribution_from_json(const nlohmann::json& spec, const QuadratureConfig& cfg = {});
/// Inline form "family:k=v,..." or "family:v1,v2", e.g. "poisson:lambda=3", "normal:0,1".
Distribution parse_distribution(const std::string& text, const QuadratureConfig& cfg = {});
nlohmann::json family_to_json(const BuiltinFamily& family);

}  // namespace steinvar
