#pragma once

#include "steinvar/distribution.hpp"
#include "steinvar/shift.hpp"
#include "steinvar/test_function.hpp"

namespace steinvar {

/// x ↦ value on S(p), extended by zero elsewhere.
class OperatorResult {
 public:
  OperatorResult(Distribution dist, RealFn eval, std::string label = "");

  double operator()(double x) const;
  const Distribution& distribution() const { return dist_; }
  const std::string& label() const { return label_; }
  /// Wraps the result as a test function (derivatives by central differences).
  TestFunction as_test_function() const;

 private:
  Distribution dist_;
  RealFn eval_;
  std::string label_;
};

/// Δ^ℓ f(x): forward difference, backward difference f(x) − f(x−1), or f'(x).
double delta(Shift ell, const TestFunction& f, double x);

/// T^ℓ f = Δ^ℓ(f p)/p.
OperatorResult canonical_op(const Distribution& dist, Shift ell, const TestFunction& f);

/// L^ℓ h(x) = (1/p(x)) ∫ χ^ℓ(y, x)(h(y) − E h) p(y) dμ(y); the complementary
/// upper integral is used once P(x) > 1/2.
OperatorResult pseudo_inverse(const Distribution& dist, Shift ell, const TestFunction& h,
                              const QuadratureConfig& cfg = {});

/// τ = −L^ℓ(Id − μ).
OperatorResult stein_kernel(const Distribution& dist, Shift ell, const QuadratureConfig& cfg = {});

/// A g = η̄ g + L^ℓ η · Δ^{−ℓ} g with η̄ = η − E η.
OperatorResult standardized_op(const Distribution& dist, Shift ell, const TestFunction& eta, const TestFunction& g,
                               const QuadratureConfig& cfg = {});

/// g = L^ℓ h / L^ℓ η, the solution of A g = h − E h.
OperatorResult solve_stein_equation(const Distribution& dist, Shift ell, const TestFunction& h,
                                    const TestFunction& eta, const QuadratureConfig& cfg = {});

struct ClassCheck {
  double lower_boundary = 0.0;  // limit of f p (or its lattice analogue) at the lower end
  double upper_boundary = 0.0;
  double mean_of_operator = 0.0;  // E[T f(X)]
  bool member = false;
};

/// Numerical test of the boundary conditions that make E[T^ℓ f(X)] = 0.
ClassCheck check_canonical_class(const Distribution& dist, Shift ell, const TestFunction& f,
                                 const QuadratureConfig& cfg = {}, double tol = 1e-8);

/// E h(X) with h's breakpoints honoured.
double mean_of(const Distribution& dist, const TestFunction& h, const QuadratureConfig& cfg = {});

}  // namespace steinvar
