#pragma once

// Grid evaluation kernels. Each comes in a serial reference form and an OpenMP
// form; both produce identical results element by element.

#include "steinvar/distribution.hpp"
#include "steinvar/shift.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace steinvar {

enum class Execution { Serial, Parallel };

std::vector<double> linspace(double lo, double hi, std::size_t n);

/// "a:b:step" (inclusive of b up to rounding) or a comma separated list.
std::vector<double> parse_grid(const std::string& text);

/// Points covering the effective support: every lattice point for counting
/// targets (thinned to at most `n` when the range is wider), otherwise `n`
/// quantiles between 1e-6 and 1 − 1e-6 merged with the finite breakpoints.
std::vector<double> support_grid(const Distribution& dist, std::size_t n = 200);

std::vector<double> evaluate(const RealFn& f, std::span<const double> xs, Execution exec = Execution::Parallel);

/// max_i |f(x_i) − g(x_i)|
double max_discrepancy(const RealFn& f, const RealFn& g, std::span<const double> xs,
                       Execution exec = Execution::Parallel);

/// K^ℓ(x_i, x_j)
Eigen::MatrixXd kernel_matrix(const Distribution& dist, Shift ell, std::span<const double> xs,
                              Execution exec = Execution::Parallel);

/// Σ_ij u_i K(x_i, x_j) u_j
double kernel_quadratic_form(const Eigen::MatrixXd& k, std::span<const double> u);

}  // namespace steinvar
