#pragma once

#include "steinvar/grid.hpp"
#include "steinvar/stein_ops.hpp"

#include <vector>

namespace steinvar {

/// R^ℓ(x) = E[χ^ℓ(X₁, x)] E[χ^{−ℓ}(x, X₂)] / p(x):
/// P(X ≤ x−1) P(X ≥ x) / p(x) for ℓ = +1, P(X ≤ x) P(X > x) / p(x) for ℓ = −1
/// and P(x)(1 − P(x))/p(x) for ℓ = 0.
double factor_R(const Distribution& dist, Shift ell, double x);

struct FactorProfile {
  RealFn eval;
  std::vector<double> grid;
  std::vector<double> values;
  double sup_on_grid = 0.0;
  double argmax = 0.0;
};

FactorProfile factor_profile(const Distribution& dist, Shift ell, std::span<const double> grid,
                             Execution exec = Execution::Parallel);

/// sup |h| over the support grid plus any extra points.
double sup_norm(const Distribution& dist, const TestFunction& h, std::span<const double> extra = {});

struct InverseBoundCheck {
  double lhs = 0.0;  // |L^ℓ h(x)|
  double rhs = 0.0;  // 2 ‖h‖∞ R^ℓ(x)
  double h_sup = 0.0;
  bool holds = false;
};

InverseBoundCheck inverse_bound_check(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                                      const QuadratureConfig& cfg = {});
InverseBoundCheck inverse_bound_check(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                                      double h_sup, const QuadratureConfig& cfg = {});

struct LipschitzCheck {
  double g_value = 0.0;
  bool bound_ok = false;
};

/// |g(x)| ≤ k for g = L h / L η when |h(x) − h(y)| ≤ k |η(x) − η(y)|. The
/// domination and the strict monotonicity of η are spot-checked on seeded
/// pairs; InvalidParameter if either fails.
LipschitzCheck lipschitz_solution_bound(const Distribution& dist, Shift ell, const TestFunction& h,
                                        const TestFunction& eta, double k, double x,
                                        const QuadratureConfig& cfg = {});

struct MillsBounds {
  double lower1 = 0.0;  // 1/(√(x²+4) + x)
  double half_r = 0.0;
  double R = 0.0;       // Φ(x)(1 − Φ(x))/φ(x)
  double r = 0.0;       // (1 − Φ(x))/φ(x)
  double upper = 0.0;   // 4/(√(x²+8) + 3x)
  bool chain_holds(double tol = 1e-12) const;
};

/// Standard normal, x ≥ 0.
MillsBounds mills_bounds_gaussian(double x);

struct SignCheck {
  bool constant = false;
  int sign = 0;  // +1, −1, or 0 when L h vanishes on the grid
  double min_value = 0.0;
  double max_value = 0.0;
};

/// Sign of L^ℓ h over a dense support grid. h must be monotone; this is checked
/// on 10³ seeded pairs and InvalidParameter is raised otherwise.
SignCheck sign_constancy_check(const Distribution& dist, Shift ell, const TestFunction& h,
                               const QuadratureConfig& cfg = {}, std::size_t grid_points = 400);

}  // namespace steinvar
