#pragma once

#include "steinvar/stein_ops.hpp"

namespace steinvar {

/// K^ℓ(x, x′) = P(x ∧ x′ − s) P̄(x ∨ x′ − s), s = ℓ(ℓ+1)/2.
double kernel_K(const Distribution& dist, Shift ell, double x, double y);

/// χ^ℓ(u, x) χ^{−ℓ}(x, v) / p(x); zero where p vanishes.
double phi3(const Distribution& dist, Shift ell, double u, double x, double v);
/// χ^ℓ(u, x₁) χ^{ℓ²}(x₁, x₂) χ^{−ℓ}(x₂, v) / (p(x₁) p(x₂)).
double phi4(const Distribution& dist, Shift ell, double u, double x1, double x2, double v);

/// −L h(x) from the covariance kernel: (1/p(x)) ∫ K(y, x) Δ^{−ℓ}h(y) dμ(y).
double inverse_via_kernel(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                          const QuadratureConfig& cfg = {});

/// −L h(x) = E[(h(X₂) − h(X₁)) Φ(X₁, x, X₂)], by nested quadrature or a double sum.
double inverse_via_double(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                          const QuadratureConfig& cfg = {});

/// Cov[h(X), g(X)] computed directly.
double cov_direct(const Distribution& dist, const TestFunction& h, const TestFunction& g,
                  const QuadratureConfig& cfg = {});
/// E[−L h(X) Δ^{−ℓ}g(X)].
double cov_via_inverse(const Distribution& dist, Shift ell, const TestFunction& h, const TestFunction& g,
                       const QuadratureConfig& cfg = {});
/// ∫∫ Δ^{−ℓ}h(x) K(x, x′) Δ^{−ℓ}g(x′) dμ dμ.
double cov_via_kernel(const Distribution& dist, Shift ell, const TestFunction& h, const TestFunction& g,
                      const QuadratureConfig& cfg = {});
/// E[(g(X₂) − g(X₁))² 𝕀[X₁ < X₂]].
double variance_pair_identity(const Distribution& dist, const TestFunction& g, const QuadratureConfig& cfg = {});

struct LagrangeResult {
  double lhs_sq = 0.0;     // E[a b Φ]²
  double product = 0.0;    // E[a² Φ] E[b² Φ]
  double remainder = 0.0;  // E[(a₁b₂ − a₂b₁)² Φ₄]
  double identity_error() const { return lhs_sq - (product - remainder); }
};

LagrangeResult lagrange_residual(const Distribution& dist, Shift ell, const TestFunction& a, const TestFunction& b,
                                 double u, double v, const QuadratureConfig& cfg = {});

struct GradientIdentity {
  double cov = 0.0;  // Cov[X, g(X)]
  double rhs = 0.0;  // Var[X] E[∇g(X)]
};

/// Binomial and Poisson only; UnsupportedSupport otherwise.
GradientIdentity natural_gradient_identity(const Distribution& dist, const TestFunction& g);

/// Integration window {x : χ^ℓ(u, x) χ^{−ℓ}(x, v) = 1} intersected with the support.
Limits phi_window(const Distribution& dist, Shift ell, double u, double v);

}  // namespace steinvar
