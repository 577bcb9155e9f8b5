#pragma once

#include "steinvar/support.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace steinvar {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  /// Refinement levels of the double-exponential rules (each level halves the step).
  int max_subdivisions = 15;
  double tail_mass_cut = 1e-14;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

using RealFn = std::function<double(double)>;
using RealFn2 = std::function<double(double, double)>;

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// ∫_lo^hi f(x) dx. The range is split at the given breakpoints (kinks or jumps
/// of the integrand); infinite ends are handled by exp-sinh, finite pieces by
/// tanh-sinh, so integrable endpoint singularities need no special care.
Estimate integrate(const RealFn& f, double lo, double hi, const QuadratureConfig& cfg = {},
                   std::span<const double> breakpoints = {});

/// Σ_{k ∈ Z ∩ [lo, hi]} f(k). Infinite ends are truncated once the terms stay
/// below tail_mass_cut relative to the running sum.
Estimate sum_lattice(const RealFn& f, double lo, double hi, const QuadratureConfig& cfg = {});

/// ∫ f dμ over the support, dispatching on the measure.
Estimate integrate(const RealFn& f, const SupportSpec& support, const QuadratureConfig& cfg = {},
                   std::span<const double> breakpoints = {});

struct Limits {
  double lo;
  double hi;
};

/// Iterated region: outer variable over `outer`, inner variable over
/// `inner(x)` (intersected with `inner_measure`'s lattice when counting).
struct Region2 {
  SupportSpec outer;
  std::function<Limits(double)> inner;
  MeasureKind inner_measure = MeasureKind::Lebesgue;
  std::vector<double> outer_breakpoints;
  std::function<std::vector<double>(double)> inner_breakpoints;
};

Estimate integrate2(const RealFn2& f, const Region2& region, const QuadratureConfig& cfg = {});
/// Rectangle sx × sy.
Estimate integrate2(const RealFn2& f, const SupportSpec& sx, const SupportSpec& sy,
                    const QuadratureConfig& cfg = {}, std::span<const double> breakpoints_x = {},
                    std::span<const double> breakpoints_y = {});

/// Comparison tolerance used across the library: 10× the integrator's error
/// estimate, floored at 1e-10.
double comparison_tolerance(double error_estimate);

// w * v, treating a zero weight as absorbing so that 0 * inf stays 0.
inline double weighted(double w, double v) { return w == 0.0 ? 0.0 : w * v; }

struct MonteCarloConfig {
  std::uint64_t seed = 0;
  std::size_t samples = 1'000'000;
  bool report_stderr = true;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

using Sampler = std::function<double(std::mt19937_64&)>;

/// Sample mean of f(X_1, ..., X_arity) over iid draws. Draws are produced in
/// fixed-size chunks, each seeded from (seed, chunk index), and partial sums are
/// combined in chunk order, so the result does not depend on the thread count.
McEstimate mc_expect(const std::function<double(std::span<const double>)>& f, const Sampler& draw,
                     std::size_t arity, const MonteCarloConfig& cfg = {});

std::uint64_t splitmix64(std::uint64_t x);

/// Smallest eigenvalue of (A + Aᵀ)/2.
double min_eigenvalue(const Eigen::MatrixXd& a);
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

}  // namespace steinvar
