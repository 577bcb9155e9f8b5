#include "steinvar/bounds.hpp"

#include "steinvar/errors.hpp"

#include <algorithm>
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

void require_sequence(const Distribution& dist, const ShiftSequence& ells, int k) {
  if (k < 1) fail(ErrorCode::InvalidParameter, "order must be at least 1");
  if (static_cast<std::size_t>(k) > ells.size()) {
    fail(ErrorCode::InvalidParameter, "order " + std::to_string(k) + " needs at least that many shifts");
  }
  for (int i = 0; i < k; ++i) require_compatible(ells[static_cast<std::size_t>(i)], dist.measure());
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

/// Δ^{−ℓ} f as a test function of its own.
TestFunction back_difference(Shift ell, const TestFunction& f) {
  if (ell.value() == 0) return f.derivative();
  const Shift back = ell.opposite();
  return TestFunction("D" + f.label(), [back, f](double x) { return delta(back, f, x); });
}

/// g, g', ..., g^{(n)}. Beyond second order a finite-difference chain is too
/// noisy to be useful, so analytic derivatives are required there.
std::vector<TestFunction> derivative_chain(const TestFunction& g, int n) {
  std::vector<TestFunction> out{g};
  for (int k = 1; k <= n; ++k) {
    const TestFunction& prev = out.back();
    if (k >= 3 && !prev.has_analytic_derivative()) {
      fail(ErrorCode::MissingDerivative, "order " + std::to_string(k) + " derivative of " + g.label() + " is unknown");
    }
    out.push_back(prev.derivative());
  }
  return out;
}

/// E[(x − X)^j 𝕀[X ≤ x]] and E[(X − x)^j 𝕀[X ≥ x]], divided by e^{log_scale}.
double lower_moment(const Distribution& dist, int j, double x, double log_scale, const QuadratureConfig& cfg) {
  return partial_expect(dist, [x, j](double y) { return std::pow(x - y, j); }, -kInf, x, log_scale, cfg).value;
}
double upper_moment(const Distribution& dist, int j, double x, double log_scale, const QuadratureConfig& cfg) {
  return partial_expect(dist, [x, j](double y) { return std::pow(y - x, j); }, x, kInf, log_scale, cfg).value;
}

/// p(x) Γ_k(x) = [M⁻_{k−1} M⁺_k + M⁻_k M⁺_{k−1}] / (k!(k−1)!), scaled by e^{−log_scale}
/// on whichever side is the tail.
double weighted_gamma_continuous(const Distribution& dist, int k, double x, double log_scale,
                                 const QuadratureConfig& cfg) {
  const bool left_tail = dist.cdf(x) <= 0.5;
  const double ls = left_tail ? log_scale : 0.0;
  const double rs = left_tail ? 0.0 : log_scale;
  const double lo_a = lower_moment(dist, k - 1, x, ls, cfg);
  const double lo_b = lower_moment(dist, k, x, ls, cfg);
  const double up_a = upper_moment(dist, k, x, rs, cfg);
  const double up_b = upper_moment(dist, k - 1, x, rs, cfg);
  return (lo_a * up_a + lo_b * up_b) / (factorial(k) * factorial(k - 1));
}

/// Sum over r of E[F_r(X)] E[G_r(X)] for the nested definition of p(x) Γ_k(x),
/// continuous targets. F and G start as {χ, −h_k χ} and {h_k χ, χ}; each outer
/// level integrates against h_i'.
double weighted_gamma_nested_continuous(const Distribution& dist, std::span<const TestFunction> hs, double x,
                                        double log_scale, const QuadratureConfig& cfg) {
  const std::size_t k = hs.size();
  std::vector<TestFunction> dh;
  for (std::size_t i = 0; i + 1 < k; ++i) dh.push_back(hs[i].derivative());
  const TestFunction hk = hs[k - 1];
  auto breaks = std::vector<double>(dist.breakpoints().begin(), dist.breakpoints().end());
  for (const auto& h : hs) breaks = joined(breaks, h.breakpoints());

  // level(i, r, side)(y): the left (side 0, y ≤ x) or right (side 1, y ≥ x) function at depth i.
  std::function<double(std::size_t, int, int, double)> level = [&](std::size_t i, int r, int side,
                                                                  double y) -> double {
    if (i + 1 == k) {
      if (side == 0) return y <= x ? (r == 0 ? 1.0 : -hk(y)) : 0.0;
      return y >= x ? (r == 0 ? hk(y) : 1.0) : 0.0;
    }
    if (side == 0) {
      if (y > x) return 0.0;
      return integrate([&, i, r](double c) { return dh[i](c) * level(i + 1, r, 0, c); }, y, x, cfg, breaks).value;
    }
    if (y < x) return 0.0;
    return integrate([&, i, r](double d) { return dh[i](d) * level(i + 1, r, 1, d); }, x, y, cfg, breaks).value;
  };

  const bool left_tail = dist.cdf(x) <= 0.5;
  const double ls = left_tail ? log_scale : 0.0;
  const double rs = left_tail ? 0.0 : log_scale;
  double total = 0.0;
  for (int r = 0; r < 2; ++r) {
    const double el =
        partial_expect(dist, [&](double y) { return level(0, r, 0, y); }, -kInf, x, ls, cfg, breaks).value;
    const double er =
        partial_expect(dist, [&](double y) { return level(0, r, 1, y); }, x, kInf, rs, cfg, breaks).value;
    total += el * er;
  }
  return total;
}

double variance_of(const Distribution& dist, const TestFunction& g, const QuadratureConfig& cfg) {
  return cov_direct(dist, g, g, cfg);
}

void fill_report(ExpansionReport& out, const std::vector<double>& unsigned_terms, double variance, double tol) {
  out.oracle_variance = variance;
  out.tolerance = tol;
  double s = 0.0;
  for (std::size_t i = 0; i < unsigned_terms.size(); ++i) {
    const double t = (i % 2 == 0 ? 1.0 : -1.0) * unsigned_terms[i];
    out.terms.push_back(t);
    s += t;
    out.partial_sums.push_back(s);
    const int n = static_cast<int>(i) + 1;
    const BoundSide side = n % 2 == 0 ? BoundSide::Lower : BoundSide::Upper;
    out.sandwich.push_back(side);
    const double slack = (n % 2 == 0 ? 1.0 : -1.0) * (variance - s);
    out.sandwich_holds.push_back(slack >= -tol * std::max(1.0, std::abs(variance)));
  }
  out.remainder_estimate = variance - s;
}

/// Negative weights within this distance of zero are quadrature noise.
constexpr double kSignNoise = 1e-9;

double checked_weight(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) fail(ErrorCode::DegenerateDenominator, "difference of h vanishes on the support");
  const double w = num / den;
  if (w < 0.0) {
    if (-w > kSignNoise * (1.0 + std::abs(num))) fail(ErrorCode::SignViolation, "negative weight -L h / difference of h");
    return 0.0;
  }
  return w;
}

}  // namespace

double min_eigenvalue(const Matrix2& m) {
  Eigen::MatrixXd a(2, 2);
  a << m[0][0], m[0][1], m[1][0], m[1][1];
  return min_eigenvalue(a);
}

double klaassen_lower(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& c,
                      const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) return lattice::klaassen_lower(dist.lattice(), ell, on_lattice(f), on_lattice(c));
  const TestFunction df = f.derivative();
  const OperatorResult tc = canonical_op(dist, ell, c);
  const auto breaks = joined(f.breakpoints(), c.breakpoints());
  const double num = expect(dist, [&](double x) { return c(x) * df(x); }, cfg, breaks).value;
  const double den = expect(dist, [&](double x) {
    const double v = tc(x);
    return v * v;
  }, cfg, breaks).value;
  if (!(den > 1e-14)) fail(ErrorCode::DegenerateDenominator, "E[(T c)^2] vanishes");
  return num * num / den;
}

double klaassen_lower_inverse(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& eta,
                              const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  const OperatorResult c = pseudo_inverse(dist, ell, eta, cfg);
  const Shift back = ell.opposite();
  const auto breaks = joined(f.breakpoints(), eta.breakpoints());
  const double num = expect(dist, [&](double x) { return c(x) * delta(back, f, x); }, cfg, breaks).value;
  const double den = variance_of(dist, eta, cfg);
  if (!(den > 1e-14)) fail(ErrorCode::DegenerateDenominator, "Var[eta(X)] vanishes");
  return num * num / den;
}

double klaassen_upper(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& h,
                      const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) return lattice::klaassen_upper(dist.lattice(), ell, on_lattice(f), on_lattice(h));
  const OperatorResult lh = pseudo_inverse(dist, ell, h, cfg);
  const TestFunction df = f.derivative();
  const TestFunction dh = h.derivative();
  const auto breaks = joined(f.breakpoints(), h.breakpoints());
  return expect(dist, [&](double x) {
    const double w = checked_weight(-lh(x), dh(x));
    const double d = df(x);
    return weighted(w, d * d);
  }, cfg, breaks).value;
}

BoundReport klaassen_bounds(const Distribution& dist, Shift ell, const TestFunction& f,
                            const std::optional<TestFunction>& c, const std::optional<TestFunction>& h,
                            const QuadratureConfig& cfg) {
  BoundReport r;
  r.oracle_variance = variance_of(dist, f, cfg);
  const TestFunction id = TestFunction::identity();
  r.lower = c ? klaassen_lower(dist, ell, f, *c, cfg) : klaassen_lower_inverse(dist, ell, f, id, cfg);
  r.upper = klaassen_upper(dist, ell, f, h ? *h : id, cfg);
  r.method = "klaassen ell=" + to_string(ell) + " c=" + (c ? c->label() : std::string("L(id)")) +
             " h=" + (h ? h->label() : std::string("id"));
  r.tolerances = {cfg.abs_tol, cfg.rel_tol, 1e-8 * std::max(1.0, std::abs(r.oracle_variance))};
  const double tol = r.tolerances.comparison;
  r.lower_holds = r.lower <= r.oracle_variance + tol;
  r.upper_holds = r.oracle_variance <= r.upper + tol;
  r.lower_tight = std::abs(r.lower - r.oracle_variance) <= tol;
  r.upper_tight = std::abs(r.upper - r.oracle_variance) <= tol;
  return r;
}

OperatorResult gamma_k(const Distribution& dist, const ShiftSequence& ells, int k, const QuadratureConfig& cfg) {
  require_sequence(dist, ells, k);
  std::vector<Shift> prefix(ells.begin(), ells.begin() + k);
  const std::string label = "Gamma_" + std::to_string(k);
  if (dist.is_discrete()) {
    const auto& t = dist.lattice();
    // Gate the closed form against the nested definition before relying on it.
    std::vector<lattice::Fn<double>> ids(prefix.size(), [](long y) { return static_cast<double>(y); });
    bool closed_ok = true;
    bool any = false;
    const long span = t.hi() - t.lo();
    for (long x = t.lo(); x <= t.hi(); ++x) {
      if (lattice::weighted_gamma_closed(t, std::span<const Shift>(prefix), x) != 0.0) {
        any = true;
        break;
      }
    }
    if (!any) fail(ErrorCode::UnsupportedOrder, label + " vanishes on the whole support");
    for (int i = 0; i <= 8; ++i) {
      const long x = t.lo() + span * i / 8;
      if (t.pmf(x) < 1e-200) continue;
      const double a = lattice::gamma_closed(t, std::span<const Shift>(prefix), x);
      const double b = lattice::gamma_nested(t, std::span<const Shift>(prefix),
                                             std::span<const lattice::Fn<double>>(ids), x);
      if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(b))) closed_ok = false;
    }
    return OperatorResult(
        dist,
        [dist, prefix, ids, closed_ok](double x) {
          const auto& tab = dist.lattice();
          const long xi = static_cast<long>(x);
          if (closed_ok) return lattice::gamma_closed(tab, std::span<const Shift>(prefix), xi);
          return lattice::gamma_nested(tab, std::span<const Shift>(prefix),
                                       std::span<const lattice::Fn<double>>(ids), xi);
        },
        label);
  }
  return OperatorResult(
      dist,
      [dist, k, cfg](double x) {
        const double lp = dist.log_pdf(x);
        return weighted_gamma_continuous(dist, k, x, lp, cfg);
      },
      label);
}

OperatorResult gamma_k_general(const Distribution& dist, const ShiftSequence& ells, std::span<const TestFunction> hs,
                               const QuadratureConfig& cfg) {
  const int k = static_cast<int>(hs.size());
  require_sequence(dist, ells, k);
  std::vector<Shift> prefix(ells.begin(), ells.begin() + k);
  std::vector<TestFunction> hv(hs.begin(), hs.end());
  const std::string label = "Gamma_" + std::to_string(k);
  if (dist.is_discrete()) {
    std::vector<lattice::Fn<double>> fns;
    for (const auto& h : hv) fns.push_back(on_lattice(h));
    return OperatorResult(
        dist,
        [dist, prefix, fns](double x) {
          return lattice::gamma_nested(dist.lattice(), std::span<const Shift>(prefix),
                                       std::span<const lattice::Fn<double>>(fns), static_cast<long>(x));
        },
        label);
  }
  if (k > kMaxContinuousNestedOrder) {
    fail(ErrorCode::UnsupportedOrder, "nested evaluation of Γ_k on a continuous target is limited to k <= " +
                                          std::to_string(kMaxContinuousNestedOrder));
  }
  return OperatorResult(
      dist,
      [dist, hv, cfg](double x) {
        return weighted_gamma_nested_continuous(dist, hv, x, dist.log_pdf(x), cfg);
      },
      label);
}

ExpansionReport variance_expansion(const Distribution& dist, const TestFunction& g, int n, const ShiftSequence& ells,
                                   const ExpansionOptions& options) {
  require_sequence(dist, ells, n);
  std::vector<TestFunction> ids(static_cast<std::size_t>(n), TestFunction::identity());
  const QuadratureConfig& cfg = options.quadrature;
  std::vector<double> terms;
  if (dist.is_discrete()) {
    terms = lattice::expansion_terms(dist.lattice(), std::span<const Shift>(ells.data(), ells.size()), on_lattice(g), n);
  } else {
    const auto chain = derivative_chain(g, n);
    const SupportSpec s = dist.support();
    std::vector<double> breaks(dist.breakpoints().begin(), dist.breakpoints().end());
    for (const auto& d : chain) breaks = joined(breaks, d.breakpoints());
    for (int k = 1; k <= n; ++k) {
      const TestFunction& dk = chain[static_cast<std::size_t>(k)];
      const double t = integrate(
                           [&](double x) {
                             const double d = dk(x);
                             const double lp = dist.log_pdf(x);
                             const double w = std::exp(lp);
                             if (d == 0.0 || w == 0.0) return 0.0;
                             return d * d * w * weighted_gamma_continuous(dist, k, x, lp, cfg);
                           },
                           s.lower, s.upper, cfg, breaks)
                           .value;
      terms.push_back(t);
    }
  }
  ExpansionReport out;
  fill_report(out, terms, variance_of(dist, g, cfg), options.tolerance);
  if (options.monte_carlo) {
    out.mc_remainder = remainder_monte_carlo(dist, g, n, ells, ids, *options.monte_carlo);
  }
  return out;
}

ExpansionReport variance_expansion(const Distribution& dist, const TestFunction& g, int n, const ShiftSequence& ells,
                                   std::span<const TestFunction> hs, const ExpansionOptions& options) {
  require_sequence(dist, ells, n);
  if (hs.size() < static_cast<std::size_t>(n)) fail(ErrorCode::InvalidParameter, "need one standardizer per order");
  const QuadratureConfig& cfg = options.quadrature;
  std::vector<double> terms;
  TestFunction gk = g;
  for (int k = 1; k <= n; ++k) {
    const Shift ell = ells[static_cast<std::size_t>(k - 1)];
    const TestFunction dg = back_difference(ell, gk);
    const TestFunction dh = back_difference(ell, hs[static_cast<std::size_t>(k - 1)]);
    const OperatorResult gam = gamma_k_general(dist, ells, hs.first(static_cast<std::size_t>(k)), cfg);
    const double t = expect(dist, [&](double x) {
      const double d = dg(x);
      if (d == 0.0) return 0.0;
      const double w = dh(x);
      if (!(w > 0.0)) fail(ErrorCode::InvalidParameter, "standardizer must be strictly increasing on the support");
      return d * d / w * gam(x);
    }, cfg, joined(dg.breakpoints(), dist.breakpoints())).value;
    terms.push_back(t);
    gk = TestFunction("g" + std::to_string(k), [dg, dh](double x) {
      const double w = dh(x);
      return w == 0.0 ? 0.0 : dg(x) / w;
    });
  }
  ExpansionReport out;
  fill_report(out, terms, variance_of(dist, g, cfg), options.tolerance);
  if (options.monte_carlo) {
    std::vector<TestFunction> hv(hs.begin(), hs.begin() + n);
    out.mc_remainder = remainder_monte_carlo(dist, g, n, ells, hv, *options.monte_carlo);
  }
  return out;
}

ExpansionReport houdre_kagan_gaussian(const TestFunction& g, double sigma2, int n, const ExpansionOptions& options) {
  if (!(sigma2 > 0.0)) fail(ErrorCode::InvalidParameter, "sigma2 must be positive");
  if (n < 1) fail(ErrorCode::InvalidParameter, "order must be at least 1");
  const Distribution dist = make_builtin(Normal{0.0, sigma2});
  const auto chain = derivative_chain(g, n);
  std::vector<double> terms;
  double weight = 1.0;
  for (int k = 1; k <= n; ++k) {
    weight *= sigma2 / k;
    const TestFunction& dk = chain[static_cast<std::size_t>(k)];
    const double m = expect(dist, [&](double x) {
      const double d = dk(x);
      return d * d;
    }, options.quadrature, dk.breakpoints()).value;
    terms.push_back(weight * m);
  }
  ExpansionReport out;
  fill_report(out, terms, variance_of(dist, g, options.quadrature), options.tolerance);
  if (options.monte_carlo) {
    std::vector<TestFunction> ids(static_cast<std::size_t>(n), TestFunction::identity());
    out.mc_remainder = remainder_monte_carlo(dist, g, n, ShiftSequence(static_cast<std::size_t>(n), Shift(0)), ids,
                                             *options.monte_carlo);
  }
  return out;
}

McEstimate remainder_monte_carlo(const Distribution& dist, const TestFunction& g, int n, const ShiftSequence& ells,
                                 std::span<const TestFunction> hs, const MonteCarloConfig& mc) {
  require_sequence(dist, ells, n);
  // g_n and the weights Δ^{−ℓ_i} h_i.
  std::vector<TestFunction> dh;
  TestFunction gk = g;
  for (int k = 1; k <= n; ++k) {
    const Shift ell = ells[static_cast<std::size_t>(k - 1)];
    const TestFunction dg = back_difference(ell, gk);
    const TestFunction d = back_difference(ell, hs[static_cast<std::size_t>(k - 1)]);
    dh.push_back(d);
    gk = TestFunction("g", [dg, d](double x) {
      const double w = d(x);
      return w == 0.0 ? 0.0 : dg(x) / w;
    });
  }
  std::vector<Shift> seq(ells.begin(), ells.begin() + n);
  auto f = [dist, gk, dh, seq, n](std::span<const double> xs) {
    // xs[0] = X₁, xs[1] = X₂, xs[2i] = X_{2i+1}, xs[2i+1] = X_{2i+2}.
    double w = 1.0;
    for (int i = 1; i <= n; ++i) {
      const Shift l = seq[static_cast<std::size_t>(i - 1)];
      const double outer_lo = xs[static_cast<std::size_t>(2 * i - 2)];
      const double outer_hi = xs[static_cast<std::size_t>(2 * i - 1)];
      const double in_lo = xs[static_cast<std::size_t>(2 * i)];
      const double in_hi = xs[static_cast<std::size_t>(2 * i + 1)];
      if (!chi(l, outer_lo, in_lo) || !chi(l.squared(), in_lo, in_hi) || !chi(l.opposite(), in_hi, outer_hi)) {
        return 0.0;
      }
      const double p = dist.pdf(in_lo) * dist.pdf(in_hi);
      if (p == 0.0) return 0.0;
      w *= dh[static_cast<std::size_t>(i - 1)](in_lo) * dh[static_cast<std::size_t>(i - 1)](in_hi) / p;
    }
    const double d = gk(xs[static_cast<std::size_t>(2 * n + 1)]) - gk(xs[static_cast<std::size_t>(2 * n)]);
    return d * d * w;
  };
  return mc_expect(f, dist, static_cast<std::size_t>(2 * n + 2), mc);
}

MatrixBoundReport olkin_shepp(const Distribution& dist, Shift ell, const TestFunction& f, const TestFunction& g,
                              const TestFunction& h, const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  MatrixBoundReport r;
  const double vf = variance_of(dist, f, cfg);
  const double vg = variance_of(dist, g, cfg);
  const double cfg_cov = cov_direct(dist, f, g, cfg);
  r.lhs = {{{vf, cfg_cov}, {cfg_cov, vg}}};

  const TestFunction df = back_difference(ell, f);
  const TestFunction dg = back_difference(ell, g);
  const TestFunction dh = back_difference(ell, h);
  double ff = 0.0, fg = 0.0, gg = 0.0;
  if (dist.is_discrete()) {
    const auto& t = dist.lattice();
    const auto hf = on_lattice(h);
    const double mh = lattice::expect(t, hf);
    Accumulator<double> a, b, c;
    for (long x = t.lo(); x <= t.hi(); ++x) {
      const double p = t.pmf(x);
      if (p == 0.0) continue;
      const double w = checked_weight(-lattice::pseudo_inverse(t, ell, hf, mh, x), dh(static_cast<double>(x)));
      const double u = df(static_cast<double>(x));
      const double v = dg(static_cast<double>(x));
      a.add(p * w * u * u);
      b.add(p * w * u * v);
      c.add(p * w * v * v);
    }
    ff = a.value();
    fg = b.value();
    gg = c.value();
  } else {
    const OperatorResult lh = pseudo_inverse(dist, ell, h, cfg);
    const auto breaks = joined(joined(f.breakpoints(), g.breakpoints()), h.breakpoints());
    auto weight = [&](double x) { return checked_weight(-lh(x), dh(x)); };
    ff = expect(dist, [&](double x) {
      const double u = df(x);
      return weighted(weight(x), u * u);
    }, cfg, breaks).value;
    fg = expect(dist, [&](double x) { return weighted(weight(x), df(x) * dg(x)); }, cfg, breaks).value;
    gg = expect(dist, [&](double x) {
      const double v = dg(x);
      return weighted(weight(x), v * v);
    }, cfg, breaks).value;
  }
  r.rhs = {{{ff, fg}, {fg, gg}}};
  Matrix2 diff{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) diff[i][j] = r.rhs[i][j] - r.lhs[i][j];
  }
  r.diff_min_eigenvalue = min_eigenvalue(diff);
  r.det_inequality_slack = (ff * gg - fg * fg) - (vf * vg - cfg_cov * cfg_cov);
  return r;
}

MatrixCsReport matrix_cs_residual(const Distribution& dist, Shift ell, const TestFunction& a, const TestFunction& b,
                                  const TestFunction& f, double u, double v, const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  MatrixCsReport r;
  if (dist.is_discrete()) {
    const auto pieces = lattice::matrix_cs(dist.lattice(), ell, on_lattice(a), on_lattice(b), on_lattice(f), u, v);
    r.lhs = pieces.lhs;
    r.rhs = pieces.rhs;
    r.residual = pieces.residual;
  } else {
    const Limits w = phi_window(dist, ell, u, v);
    if (w.lo < w.hi) {
      const auto breaks = joined(joined(a.breakpoints(), b.breakpoints()), f.breakpoints());
      auto m = [&](const RealFn& fn) { return measure_integral(dist, fn, w.lo, w.hi, cfg, breaks).value; };
      const double af = m([&](double x) { return a(x) * f(x); });
      const double bf = m([&](double x) { return b(x) * f(x); });
      const double aa = m([&](double x) { return a(x) * a(x); });
      const double ab = m([&](double x) { return a(x) * b(x); });
      const double bb = m([&](double x) { return b(x) * b(x); });
      const double q = m([&](double x) { return f(x) * f(x); });
      r.lhs = {{{af * af, af * bf}, {bf * af, bf * bf}}};
      r.rhs = {{{aa * q, ab * q}, {ab * q, bb * q}}};
      Region2 region;
      region.outer = {w.lo, w.hi, MeasureKind::Lebesgue};
      region.inner = [w](double x) { return Limits{x, w.hi}; };
      region.outer_breakpoints = joined(dist.breakpoints(), breaks);
      region.inner_breakpoints = [bp = region.outer_breakpoints](double) { return bp; };
      auto entry = [&](int i, int j) {
        auto comp = [&](int c, double x1, double x2) {
          const TestFunction& e = c == 0 ? a : b;
          return e(x1) * f(x2) - e(x2) * f(x1);
        };
        return integrate2([&](double x1, double x2) { return comp(i, x1, x2) * comp(j, x1, x2); }, region, cfg)
            .value;
      };
      const double r00 = entry(0, 0);
      const double r01 = entry(0, 1);
      const double r11 = entry(1, 1);
      r.residual = {{{r00, r01}, {r01, r11}}};
    }
  }
  double err = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(r.rhs[i][j] - r.lhs[i][j] - r.residual[i][j]));
  }
  r.identity_error = err;
  r.residual_min_eigenvalue = min_eigenvalue(r.residual);
  return r;
}

}  // namespace steinvar
