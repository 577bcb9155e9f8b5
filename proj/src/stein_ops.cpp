#include "steinvar/stein_ops.hpp"

#include "steinvar/errors.hpp"

#include <cmath>

namespace steinvar {

namespace {

lattice::Fn<double> on_lattice(const TestFunction& f) {
  return [fn = f.fn()](long k) { return fn(static_cast<double>(k)); };
}

bool at_support_end(const Distribution& dist, double x) {
  const SupportSpec s = dist.effective_support();
  return x == s.lower || x == s.upper;
}

}  // namespace

OperatorResult::OperatorResult(Distribution dist, RealFn eval, std::string label)
    : dist_(std::move(dist)), eval_(std::move(eval)), label_(std::move(label)) {}

double OperatorResult::operator()(double x) const {
  if (!dist_.in_support(x)) {
    if (!dist_.is_discrete() && x > dist_.support().lower && x < dist_.support().upper) {
      fail(ErrorCode::ZeroDensity, "density vanishes inside the support");
    }
    return 0.0;
  }
  return eval_(x);
}

TestFunction OperatorResult::as_test_function() const {
  OperatorResult self = *this;
  return TestFunction(label_.empty() ? "operator" : label_, [self](double x) { return self(x); })
      .with_breakpoints({dist_.breakpoints().begin(), dist_.breakpoints().end()});
}

double delta(Shift ell, const TestFunction& f, double x) {
  switch (ell.value()) {
    case 1: return f(x + 1.0) - f(x);
    case -1: return f(x) - f(x - 1.0);
    default: return f.derivative()(x);
  }
}

double mean_of(const Distribution& dist, const TestFunction& h, const QuadratureConfig& cfg) {
  return expect(dist, h.fn(), cfg, h.breakpoints()).value;
}

OperatorResult canonical_op(const Distribution& dist, Shift ell, const TestFunction& f) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) {
    const double l = ell.value();
    return OperatorResult(
        dist,
        [dist, l, f](double x) {
          const double lp = dist.log_pdf(x + l);
          const double next = lp == -kInf ? 0.0 : f(x + l) * std::exp(lp - dist.log_pdf(x));
          return (next - f(x)) / l;
        },
        "T(" + f.label() + ")");
  }
  TestFunction df = f.derivative();
  return OperatorResult(
      dist,
      [dist, f, df](double x) {
        if (auto s = dist.score(x)) return df(x) + f(x) * *s;
        // No score known: difference f p directly.
        const double h = TestFunction::difference_step(x);
        const double up = f(x + h) * dist.pdf(x + h);
        const double down = f(x - h) * dist.pdf(x - h);
        return (up - down) / (2.0 * h * dist.pdf(x));
      },
      "T(" + f.label() + ")");
}

OperatorResult pseudo_inverse(const Distribution& dist, Shift ell, const TestFunction& h, const QuadratureConfig& cfg) {
  require_compatible(ell, dist.measure());
  if (dist.is_discrete()) {
    auto fn = on_lattice(h);
    const double m = lattice::expect(dist.lattice(), fn);
    const bool open_above = std::isinf(dist.support().upper);
    return OperatorResult(
        dist,
        [dist, ell, fn, m, open_above, cfg](double x) {
          const auto& t = dist.lattice();
          const long k = static_cast<long>(x);
          const long cut = k - ell.chi_offset();
          if (!open_above || (t.in_range(k) && t.cdf(cut) <= 0.5)) return lattice::pseudo_inverse(t, ell, fn, m, k);
          // Upper tail of an unbounded lattice: walk past the table in log space.
          const double scale = dist.log_pdf(x);
          auto term = [&](double j) { return (fn(static_cast<long>(j)) - m) * std::exp(dist.log_pdf(j) - scale); };
          return -sum_lattice(term, static_cast<double>(cut + 1), kInf, cfg).value;
        },
        "L(" + h.label() + ")");
  }
  // E|h| must exist; quadrature failure surfaces as NotIntegrable.
  const Estimate abs_mean = expect(dist, [fn = h.fn()](double y) { return std::abs(fn(y)); }, cfg, h.breakpoints());
  if (!std::isfinite(abs_mean.value)) fail(ErrorCode::NotIntegrable, "E|h(X)| diverges");
  const double m = mean_of(dist, h, cfg);
  std::vector<double> breaks(h.breakpoints().begin(), h.breakpoints().end());
  return OperatorResult(
      dist,
      [dist, h, m, breaks, cfg](double x) {
        auto centred = [&h, m](double y) { return h(y) - m; };
        const double scale = dist.log_pdf(x);
        if (dist.cdf(x) <= 0.5) {
          return partial_expect(dist, centred, -kInf, x, scale, cfg, breaks).value;
        }
        return -partial_expect(dist, centred, x, kInf, scale, cfg, breaks).value;
      },
      "L(" + h.label() + ")");
}

OperatorResult stein_kernel(const Distribution& dist, Shift ell, const QuadratureConfig& cfg) {
  OperatorResult l = pseudo_inverse(dist, ell, TestFunction::identity(), cfg);
  return OperatorResult(dist, [l](double x) { return -l(x); }, "tau");
}

OperatorResult standardized_op(const Distribution& dist, Shift ell, const TestFunction& eta, const TestFunction& g,
                               const QuadratureConfig& cfg) {
  const double m = dist.is_discrete() ? lattice::expect(dist.lattice(), on_lattice(eta)) : mean_of(dist, eta, cfg);
  OperatorResult l = pseudo_inverse(dist, ell, eta, cfg);
  const Shift back = ell.opposite();
  return OperatorResult(
      dist, [eta, g, l, m, back](double x) { return (eta(x) - m) * g(x) + l(x) * delta(back, g, x); },
      "A(" + g.label() + ")");
}

OperatorResult solve_stein_equation(const Distribution& dist, Shift ell, const TestFunction& h,
                                    const TestFunction& eta, const QuadratureConfig& cfg) {
  OperatorResult lh = pseudo_inverse(dist, ell, h, cfg);
  OperatorResult le = pseudo_inverse(dist, ell, eta, cfg);
  const bool discrete = dist.is_discrete();
  const double mh = discrete ? lattice::expect(dist.lattice(), on_lattice(h)) : mean_of(dist, h, cfg);
  const double me = discrete ? lattice::expect(dist.lattice(), on_lattice(eta)) : mean_of(dist, eta, cfg);
  return OperatorResult(
      dist,
      [dist, h, eta, lh, le, mh, me](double x) {
        const double den = le(x);
        if (den != 0.0) return lh(x) / den;
        // At a support end the difference term drops out of A g, leaving η̄ g = h̄.
        if (at_support_end(dist, x) && eta(x) != me) return (h(x) - mh) / (eta(x) - me);
        fail(ErrorCode::DegenerateDenominator, "L eta vanishes at x = " + std::to_string(x));
      },
      "g(" + h.label() + ")");
}

ClassCheck check_canonical_class(const Distribution& dist, Shift ell, const TestFunction& f,
                                 const QuadratureConfig& cfg, double tol) {
  require_compatible(ell, dist.measure());
  ClassCheck out;
  const SupportSpec s = dist.effective_support();
  if (dist.is_discrete()) {
    const auto& t = dist.lattice();
    if (ell.value() == 1) {
      out.lower_boundary = f(s.lower) * t.pmf(t.lo());
      out.upper_boundary = f(s.upper + 1.0) * t.pmf(t.hi() + 1);
      if (std::isinf(dist.support().upper)) out.upper_boundary = f(s.upper) * t.pmf(t.hi());
    } else {
      out.lower_boundary = f(s.lower - 1.0) * t.pmf(t.lo() - 1);
      out.upper_boundary = f(s.upper) * t.pmf(t.hi());
    }
  } else {
    auto limit = [&](double end, double inward) {
      double last = 0.0;
      for (int k = 6; k <= 12; k += 2) {
        const double x = end + inward * std::pow(10.0, -k);
        last = f(x) * dist.pdf(x);
      }
      return last;
    };
    const double spread = std::sqrt(dist.variance());
    const double width = std::isfinite(s.upper - s.lower) ? std::max(1.0, s.upper - s.lower) : std::max(1.0, spread);
    out.lower_boundary = std::isfinite(s.lower) ? limit(s.lower, width)
                                                : f(dist.mean() - 40.0 * spread) * dist.pdf(dist.mean() - 40.0 * spread);
    out.upper_boundary = std::isfinite(s.upper) ? limit(s.upper, -width)
                                                : f(dist.mean() + 40.0 * spread) * dist.pdf(dist.mean() + 40.0 * spread);
  }
  const OperatorResult tf = canonical_op(dist, ell, f);
  out.mean_of_operator = expect(dist, [&tf](double x) { return tf(x); }, cfg, f.breakpoints()).value;
  out.member = std::abs(out.lower_boundary) <= tol && std::abs(out.upper_boundary) <= tol &&
               std::abs(out.mean_of_operator) <= tol;
  return out;
}

}  // namespace steinvar
