#pragma once

#include "steinvar/lattice.hpp"
#include "steinvar/representations.hpp"

#include <array>
#include <optional>
#include <vector>

namespace steinvar {

struct Tolerances {
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  double comparison = 0.0;  // slack allowed when checking an inequality
};

struct BoundReport {
  double lower = 0.0;
  double upper = 0.0;
  double oracle_variance = 0.0;
  std::string method;
  Tolerances tolerances;
  bool lower_holds = false;
  bool upper_holds = false;
  bool lower_tight = false;  // lower == variance within tolerance
  bool upper_tight = false;
};

/// E[c Δ^{−ℓ}f]² / E[(T^ℓ c)²].
double klaassen_lower(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& c,
                      const QuadratureConfig& cfg = {});
/// The lower bound with c = L^ℓ η, for which T^ℓ c = η − E η holds exactly.
double klaassen_lower_inverse(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& eta,
                              const QuadratureConfig& cfg = {});
/// E[(Δ^{−ℓ}f)² (−L^ℓ h) / Δ^{−ℓ}h]. SignViolation when the weight goes negative.
double klaassen_upper(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& h,
                      const QuadratureConfig& cfg = {});

/// Both bounds with Var f(X). Without c the lower bound uses c = L^ℓ(Id), and h defaults to Id.
BoundReport klaassen_bounds(const Distribution& dist, Shift ell, const TestFunction& f,
                            const std::optional<TestFunction>& c = std::nullopt,
                            const std::optional<TestFunction>& h = std::nullopt, const QuadratureConfig& cfg = {});

/// Γ_k^𝓵 with h_i = Id for i ≤ k, using the first k shifts of `ells`.
/// Continuous targets: one-sided partial moments; lattice targets: the
/// factorized closed form, gated against the nested definition.
OperatorResult gamma_k(const Distribution& dist, const ShiftSequence& ells, int k, const QuadratureConfig& cfg = {});

/// Γ_k^𝓵 with arbitrary standardizers h_1..h_k by nested evaluation of its
/// definition. Continuous targets are limited to k ≤ 3.
OperatorResult gamma_k_general(const Distribution& dist, const ShiftSequence& ells, std::span<const TestFunction> hs,
                               const QuadratureConfig& cfg = {});

inline constexpr int kMaxContinuousNestedOrder = 3;

enum class BoundSide { Lower, Upper };

struct ExpansionReport {
  std::vector<double> terms;         // signed, (−1)^{k−1} E[(Δ^{−ℓ_k} g_{k−1})² Γ_k / Δ^{−ℓ_k} h_k]
  std::vector<double> partial_sums;  // S_1..S_n
  double oracle_variance = 0.0;
  double remainder_estimate = 0.0;   // Var − S_n
  std::vector<BoundSide> sandwich;   // S_n bounds Var from below for even n, from above for odd n
  std::vector<bool> sandwich_holds;
  std::optional<McEstimate> mc_remainder;  // R_n from its defining expectation
  double tolerance = 0.0;
};

struct ExpansionOptions {
  QuadratureConfig quadrature{};
  /// Sandwich slack, relative to max(1, Var).
  double tolerance = 1e-8;
  /// When set, R_n is also estimated by Monte Carlo from its definition.
  std::optional<MonteCarloConfig> monte_carlo;
};

/// Var g(X) = Σ_{k ≤ n} (−1)^{k−1} T_k + (−1)^n R_n with h_k = Id.
ExpansionReport variance_expansion(const Distribution& dist, const TestFunction& g, int n, const ShiftSequence& ells,
                                   const ExpansionOptions& options = {});

/// The same expansion with standardizers h_1..h_n (strictly increasing on the support).
ExpansionReport variance_expansion(const Distribution& dist, const TestFunction& g, int n, const ShiftSequence& ells,
                                   std::span<const TestFunction> hs, const ExpansionOptions& options = {});

/// R_n from its defining (2n+2)-fold expectation. The h_i weights sit on the
/// inner pair (X_{2i+1}, X_{2i+2}) of each level.
McEstimate remainder_monte_carlo(const Distribution& dist, const TestFunction& g, int n, const ShiftSequence& ells,
                                 std::span<const TestFunction> hs, const MonteCarloConfig& mc = {});

/// Gaussian N(0, σ²) with Γ_j = σ^{2j}/j!.
ExpansionReport houdre_kagan_gaussian(const TestFunction& g, double sigma2, int n, const ExpansionOptions& options = {});

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct MatrixBoundReport {
  Matrix2 lhs{};  // covariance matrix of (f(X), g(X))
  Matrix2 rhs{};  // E[v vᵀ Γ₁ / Δ^{−ℓ}h]
  double diff_min_eigenvalue = 0.0;
  double det_inequality_slack = 0.0;  // det rhs − det lhs
  double tolerance = 1e-8;
  bool holds() const { return diff_min_eigenvalue >= -tolerance && det_inequality_slack >= -tolerance; }
};

MatrixBoundReport olkin_shepp(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& g,
                              const TestFunction& h, const QuadratureConfig& cfg = {});

struct MatrixCsReport {
  Matrix2 lhs{};       // E[v f Φ] E[v f Φ]ᵀ
  Matrix2 rhs{};       // E[v vᵀ Φ] E[f² Φ]
  Matrix2 residual{};  // E[w wᵀ Φ₄]
  double identity_error = 0.0;  // max |rhs − lhs − residual|
  double residual_min_eigenvalue = 0.0;
};

/// Two-dimensional Cauchy–Schwarz on the window (u, v), v = (a, b).
MatrixCsReport matrix_cs_residual(const Distribution& dist, Shift ell, const TestFunction& a, const TestFunction& b,
                                  const TestFunction& f, double u, double v, const QuadratureConfig& cfg = {});

double min_eigenvalue(const Matrix2& m);

}  // namespace steinvar
