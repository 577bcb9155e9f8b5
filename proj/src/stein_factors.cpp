#include "steinvar/stein_factors.hpp"

#include "steinvar/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace steinvar {

namespace {

constexpr std::uint64_t kPairSeed = 0x5151'a7e5'0000'0001ULL;
constexpr std::size_t kPairs = 1000;

/// Seeded pairs drawn from the target, with the effective support ends mixed in.
std::vector<std::pair<double, double>> probe_pairs(const Distribution& dist) {
  std::mt19937_64 rng(kPairSeed);
  std::vector<std::pair<double, double>> out;
  out.reserve(kPairs);
  for (std::size_t i = 0; i < kPairs; ++i) out.emplace_back(dist.sample(rng), dist.sample(rng));
  const SupportSpec s = dist.effective_support();
  if (std::isfinite(s.lower) && std::isfinite(s.upper)) out.emplace_back(s.lower, s.upper);
  return out;
}

}  // namespace

double factor_R(const Distribution& dist, Shift ell, double x) {
  require_compatible(ell, dist.measure());
  if (!dist.in_support(x)) fail(ErrorCode::ZeroDensity, "R is defined on the support only");
  const double p = dist.pdf(x);
  if (!(p > 0.0)) fail(ErrorCode::ZeroDensity, "density vanishes at x = " + std::to_string(x));
  if (ell.value() == 1) return dist.cdf(x - 1.0) * dist.sf(x - 1.0) / p;
  return dist.cdf(x) * dist.sf(x) / p;
}

FactorProfile factor_profile(const Distribution& dist, Shift ell, std::span<const double> grid, Execution exec) {
  FactorProfile out;
  out.eval = [dist, ell](double x) { return factor_R(dist, ell, x); };
  for (double x : grid) {
    if (dist.in_support(x) && dist.pdf(x) > 0.0) out.grid.push_back(x);
  }
  out.values = evaluate(out.eval, out.grid, exec);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out.values[i] > out.sup_on_grid) {
      out.sup_on_grid = out.values[i];
      out.argmax = out.grid[i];
    }
  }
  return out;
}

double sup_norm(const Distribution& dist, const TestFunction& h, std::span<const double> extra) {
  auto pts = support_grid(dist, 2000);
  pts.insert(pts.end(), extra.begin(), extra.end());
  for (double b : h.breakpoints()) {
    pts.push_back(b);
    if (dist.is_discrete()) {
      pts.push_back(std::floor(b));
      pts.push_back(std::ceil(b));
    }
  }
  const SupportSpec s = dist.effective_support();
  if (std::isfinite(s.lower)) pts.push_back(s.lower);
  if (std::isfinite(s.upper)) pts.push_back(s.upper);
  double out = 0.0;
  for (double x : pts) {
    if (!dist.in_support(x)) continue;
    out = std::max(out, std::abs(h(x)));
  }
  return out;
}

InverseBoundCheck inverse_bound_check(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                                      const QuadratureConfig& cfg) {
  const double pts[] = {x};
  return inverse_bound_check(dist, ell, h, x, sup_norm(dist, h, pts), cfg);
}

InverseBoundCheck inverse_bound_check(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                                      double h_sup, const QuadratureConfig& cfg) {
  InverseBoundCheck out;
  out.h_sup = h_sup;
  out.lhs = std::abs(pseudo_inverse(dist, ell, h, cfg)(x));
  out.rhs = 2.0 * h_sup * factor_R(dist, ell, x);
  out.holds = out.lhs <= out.rhs + 1e-9 * (1.0 + out.rhs);
  return out;
}

LipschitzCheck lipschitz_solution_bound(const Distribution& dist, Shift ell, const TestFunction& h,
                                        const TestFunction& eta, double k, double x, const QuadratureConfig& cfg) {
  if (!(k > 0.0)) fail(ErrorCode::InvalidParameter, "Lipschitz constant must be positive");
  int direction = 0;
  for (const auto& [a, b] : probe_pairs(dist)) {
    if (a == b) continue;
    const double de = eta(b) - eta(a);
    const int s = (de > 0.0) == (b > a) ? 1 : -1;
    if (de == 0.0 || (direction != 0 && s != direction)) {
      fail(ErrorCode::InvalidParameter, eta.label() + " is not strictly monotone on the support");
    }
    direction = s;
    const double dh = std::abs(h(b) - h(a));
    if (dh > k * std::abs(de) * (1.0 + 1e-12) + 1e-14) {
      fail(ErrorCode::InvalidParameter, "|h(x) - h(y)| <= k |eta(x) - eta(y)| fails at x = " + std::to_string(a) +
                                            ", y = " + std::to_string(b));
    }
  }
  LipschitzCheck out;
  out.g_value = solve_stein_equation(dist, ell, h, eta, cfg)(x);
  out.bound_ok = std::abs(out.g_value) <= k + 1e-8;
  return out;
}

bool MillsBounds::chain_holds(double tol) const {
  return lower1 <= half_r + tol && half_r <= R + tol && R <= r + tol && r <= upper + tol;
}

MillsBounds mills_bounds_gaussian(double x) {
  if (!(x >= 0.0)) fail(ErrorCode::InvalidParameter, "Mills bounds need x >= 0");
  MillsBounds m;
  const double tail = 0.5 * boost::math::erfc(x / std::numbers::sqrt2);
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * boost::math::erfc(-x / std::numbers::sqrt2);
  m.r = tail / density;
  m.half_r = 0.5 * m.r;
  m.R = cdf * m.r;
  m.lower1 = 1.0 / (std::sqrt(x * x + 4.0) + x);
  m.upper = 4.0 / (std::sqrt(x * x + 8.0) + 3.0 * x);
  return m;
}

SignCheck sign_constancy_check(const Distribution& dist, Shift ell, const TestFunction& h,
                               const QuadratureConfig& cfg, std::size_t grid_points) {
  int direction = 0;
  for (const auto& [a, b] : probe_pairs(dist)) {
    const double d = (h(b) - h(a)) * (b - a);
    if (d == 0.0) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (direction != 0 && s != direction) fail(ErrorCode::InvalidParameter, h.label() + " is not monotone");
    direction = s;
  }
  const OperatorResult lh = pseudo_inverse(dist, ell, h, cfg);
  const auto xs = support_grid(dist, grid_points);
  const auto v = evaluate([&](double x) { return lh(x); }, xs);
  SignCheck out;
  out.min_value = *std::min_element(v.begin(), v.end());
  out.max_value = *std::max_element(v.begin(), v.end());
  const double noise = 1e-12 * (1.0 + std::max(std::abs(out.min_value), std::abs(out.max_value)));
  const bool pos = out.max_value > noise;
  const bool neg = out.min_value < -noise;
  out.constant = !(pos && neg);
  out.sign = pos && !neg ? 1 : (neg && !pos ? -1 : 0);
  return out;
}

}  // namespace steinvar
