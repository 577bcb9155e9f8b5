#include "steinvar/representations.hpp"

#include "steinvar/errors.hpp"

#include <cmath>

namespace steinvar {

namespace {

lattice::Fn<double> on_lattice(const TestFunction& f) {
  return [fn = f.fn()](long k) { return fn(static_cast<double>(k)); };
}

std::vector<double> joined(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double kernel_K(const Distribution& dist, Shift ell, double x, double y) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) {
    return lattice::kernel(dist.lattice(), ell, static_cast<long>(std::floor(x)), static_cast<long>(std::floor(y)));
  }
  return dist.cdf(std::min(x, y)) * dist.sf(std::max(x, y));
}

double phi3(const Distribution& dist, Shift ell, double u, double x, double v) {
  if (!chi(ell, u, x) || !chi(ell.opposite(), x, v)) return 0.0;
  const double p = dist.pdf(x);
  return p > 0.0 ? 1.0 / p : 0.0;
}

double phi4(const Distribution& dist, Shift ell, double u, double x1, double x2, double v) {
  if (!chi(ell, u, x1) || !chi(ell.squared(), x1, x2) || !chi(ell.opposite(), x2, v)) return 0.0;
  const double p = dist.pdf(x1) * dist.pdf(x2);
  return p > 0.0 ? 1.0 / p : 0.0;
}

Limits phi_window(const Distribution& dist, Shift ell, double u, double v) {
  const SupportSpec s = dist.effective_support();
  double lo = u + ell.chi_offset();
  double hi = v - ell.opposite().chi_offset();
  if (dist.is_discrete()) {
    lo = std::ceil(lo);
    hi = std::floor(hi);
  }
  return {std::max(lo, s.lower), std::min(hi, s.upper)};
}

double inverse_via_kernel(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                          const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (!dist.in_support(x)) return 0.0;
  if (dist.is_discrete()) return lattice::inverse_via_kernel(dist.lattice(), ell, on_lattice(h), static_cast<long>(x));
  // K(y, x) splits at y = x into P(y) P̄(x) and P(x) P̄(y).
  const TestFunction dh = h.derivative();
  const auto breaks = joined(dist.breakpoints(), h.breakpoints());
  const SupportSpec s = dist.support();
  const double below = integrate([&](double y) { return weighted(dist.cdf(y), dh(y)); }, s.lower, x, cfg, breaks).value;
  const double above = integrate([&](double y) { return weighted(dist.sf(y), dh(y)); }, x, s.upper, cfg, breaks).value;
  return (dist.sf(x) * below + dist.cdf(x) * above) / dist.pdf(x);
}

double inverse_via_double(const Distribution& dist, Shift ell, const TestFunction& h, double x,
                          const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (!dist.in_support(x)) return 0.0;
  if (dist.is_discrete()) return lattice::inverse_via_double(dist.lattice(), ell, on_lattice(h), static_cast<long>(x));
  const SupportSpec s = dist.support();
  const double scale = dist.log_pdf(x);
  Region2 region;
  region.outer = {s.lower, x, MeasureKind::Lebesgue};
  region.inner = [x, s](double) { return Limits{x, s.upper}; };
  region.outer_breakpoints = joined(dist.breakpoints(), h.breakpoints());
  region.inner_breakpoints = [b = region.outer_breakpoints](double) { return b; };
  auto f = [&](double x1, double x2) {
    const double w = std::exp(dist.log_pdf(x1) + dist.log_pdf(x2) - scale);
    return w == 0.0 ? 0.0 : (h(x2) - h(x1)) * w;
  };
  return integrate2(f, region, cfg).value;
}

double cov_direct(const Distribution& dist, const TestFunction& h, const TestFunction& g, const QuadratureConfig& cfg) {
  if (dist.is_discrete()) return lattice::covariance(dist.lattice(), on_lattice(h), on_lattice(g));
  const auto breaks = joined(h.breakpoints(), g.breakpoints());
  const double mh = expect(dist, h.fn(), cfg, breaks).value;
  const double mg = expect(dist, g.fn(), cfg, breaks).value;
  return expect(dist, [&](double x) { return (h(x) - mh) * (g(x) - mg); }, cfg, breaks).value;
}

double cov_via_inverse(const Distribution& dist, Shift ell, const TestFunction& h, const TestFunction& g,
                       const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) return lattice::cov_via_inverse(dist.lattice(), ell, on_lattice(h), on_lattice(g));
  const OperatorResult lh = pseudo_inverse(dist, ell, h, cfg);
  const TestFunction dg = g.derivative();
  const auto breaks = joined(h.breakpoints(), g.breakpoints());
  return expect(dist, [&](double x) { return -lh(x) * dg(x); }, cfg, breaks).value;
}

double cov_via_kernel(const Distribution& dist, Shift ell, const TestFunction& h, const TestFunction& g,
                      const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) return lattice::cov_via_kernel(dist.lattice(), ell, on_lattice(h), on_lattice(g));
  const TestFunction dh = h.derivative();
  const TestFunction dg = g.derivative();
  const SupportSpec s = dist.support();
  const auto breaks = joined(dist.breakpoints(), joined(h.breakpoints(), g.breakpoints()));
  Region2 region;
  region.outer = s;
  region.inner = [s](double) { return Limits{s.lower, s.upper}; };
  region.outer_breakpoints = breaks;
  region.inner_breakpoints = [breaks](double x) {
    auto b = breaks;
    b.push_back(x);
    return b;
  };
  auto f = [&](double x, double y) {
    const double k = dist.cdf(std::min(x, y)) * dist.sf(std::max(x, y));
    return k == 0.0 ? 0.0 : dh(x) * k * dg(y);
  };
  return integrate2(f, region, cfg).value;
}

double variance_pair_identity(const Distribution& dist, const TestFunction& g, const QuadratureConfig& cfg) {
  if (dist.is_discrete()) return lattice::variance_pair(dist.lattice(), on_lattice(g));
  const SupportSpec s = dist.support();
  Region2 region;
  region.outer = s;
  region.inner = [s](double x) { return Limits{x, s.upper}; };
  region.outer_breakpoints = joined(dist.breakpoints(), g.breakpoints());
  region.inner_breakpoints = [b = region.outer_breakpoints](double) { return b; };
  auto f = [&](double x1, double x2) {
    const double w = std::exp(dist.log_pdf(x1) + dist.log_pdf(x2));
    if (w == 0.0) return 0.0;
    const double d = g(x2) - g(x1);
    return d * d * w;
  };
  return integrate2(f, region, cfg).value;
}

LagrangeResult lagrange_residual(const Distribution& dist, Shift ell, const TestFunction& a, const TestFunction& b,
                                 double u, double v, const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  LagrangeResult out;
  if (dist.is_discrete()) {
    const auto pieces = lattice::lagrange(dist.lattice(), ell, on_lattice(a), on_lattice(b), u, v);
    out.lhs_sq = pieces.lhs_sq;
    out.product = pieces.product;
    out.remainder = pieces.remainder;
    return out;
  }
  const Limits w = phi_window(dist, ell, u, v);
  if (!(w.lo < w.hi)) return out;
  const auto breaks = joined(a.breakpoints(), b.breakpoints());
  const double ab = measure_integral(dist, [&](double x) { return a(x) * b(x); }, w.lo, w.hi, cfg, breaks).value;
  const double aa = measure_integral(dist, [&](double x) { return a(x) * a(x); }, w.lo, w.hi, cfg, breaks).value;
  const double bb = measure_integral(dist, [&](double x) { return b(x) * b(x); }, w.lo, w.hi, cfg, breaks).value;
  Region2 region;
  region.outer = {w.lo, w.hi, MeasureKind::Lebesgue};
  region.inner = [w](double x) { return Limits{x, w.hi}; };
  region.outer_breakpoints = joined(dist.breakpoints(), breaks);
  region.inner_breakpoints = [bp = region.outer_breakpoints](double) { return bp; };
  auto f = [&](double x1, double x2) {
    const double d = a(x1) * b(x2) - a(x2) * b(x1);
    return d * d;
  };
  out.lhs_sq = ab * ab;
  out.product = aa * bb;
  out.remainder = integrate2(f, region, cfg).value;
  return out;
}

GradientIdentity natural_gradient_identity(const Distribution& dist, const TestFunction& g) {
  const auto& family = dist.family();
  if (family) {
    if (const auto* b = std::get_if<Binomial>(&*family)) {
      const auto r = lattice::binomial_gradient(dist.lattice(), b->trials, on_lattice(g));
      return {r.cov, r.rhs};
    }
    if (const auto* p = std::get_if<Poisson>(&*family)) {
      const auto r = lattice::poisson_gradient(dist.lattice(), p->rate, on_lattice(g));
      return {r.cov, r.rhs};
    }
  }
  fail(ErrorCode::UnsupportedSupport, "natural gradients are defined for binomial and Poisson targets");
}

}  // namespace steinvar
