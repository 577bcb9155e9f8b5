#include "steinvar/verify.hpp"

#include "steinvar/bounds.hpp"
#include "steinvar/errors.hpp"
#include "steinvar/exact.hpp"
#include "steinvar/report_io.hpp"
#include "steinvar/stein_factors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace steinvar {

namespace {

using Clock = std::chrono::steady_clock;

struct Named {
  std::string name;
  Distribution dist;
};

/// Tracks the worst deviation seen while a criterion runs.
class Tally {
 public:
  Tally(std::string id, std::string name, double threshold, double time_limit = 0.0)
      : start_(Clock::now()) {
    r_.id = std::move(id);
    r_.name = std::move(name);
    r_.threshold = threshold;
    r_.time_limit = time_limit;
    r_.passed = true;
  }

  /// Records |deviation|; fails the check when it exceeds the threshold.
  void deviation(double d, const std::string& where) {
    ++r_.cases;
    if (!(d <= r_.threshold)) {
      r_.passed = false;
      note(where + ": deviation " + format_double(d));
    }
    if (std::isnan(d) || d > r_.worst) r_.worst = d;
  }
  /// Records a slack that must stay ≥ −threshold.
  void slack(double s, const std::string& where) { deviation(s >= 0.0 ? 0.0 : -s, where); }
  void require(bool ok, const std::string& where) {
    ++r_.cases;
    if (!ok) {
      r_.passed = false;
      note(where);
    }
  }
  void error(const std::string& where, const std::exception& e) {
    ++r_.cases;
    r_.passed = false;
    note(where + ": " + e.what());
  }
  CheckResult finish() {
    r_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    if (r_.time_limit > 0.0 && r_.seconds > r_.time_limit) {
      r_.passed = false;
      note("runtime " + format_double(r_.seconds) + " s over the limit");
    }
    return r_;
  }

 private:
  void note(const std::string& s) {
    if (notes_++ < 6) r_.detail += (r_.detail.empty() ? "" : "; ") + s;
  }
  CheckResult r_;
  Clock::time_point start_;
  int notes_ = 0;
};

template <class F>
void guarded(Tally& t, const std::string& where, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    t.error(where, e);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> quantile_grid(const Distribution& d, std::size_t n = 20) {
  if (d.is_discrete()) {
    const SupportSpec s = d.effective_support();
    std::vector<double> out;
    for (long k = static_cast<long>(s.lower); k <= static_cast<long>(s.upper) && out.size() < n; ++k) {
      out.push_back(static_cast<double>(k));
    }
    return out;
  }
  std::vector<double> out;
  for (double q : linspace(0.001, 0.999, n)) out.push_back(d.quantile(q));
  return out;
}

std::vector<Shift> shifts_for(const Distribution& d) {
  if (d.is_discrete()) return {Shift::forward(), Shift::backward()};
  return {Shift::differential()};
}

std::string at(const std::string& dist, Shift ell, const std::string& what, double x) {
  return dist + " ell=" + to_string(ell) + " " + what + " x=" + fmt(x);
}

TestFunction custom(std::string label, RealFn f, RealFn df) {
  return TestFunction(std::move(label), std::vector<RealFn>{std::move(f), std::move(df)});
}

TestFunction random_polynomial(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int d = deg(rng);
  std::vector<double> c(static_cast<std::size_t>(d) + 1);
  for (auto& v : c) v = coef(rng);
  return TestFunction::polynomial(c);
}

std::vector<Named> builtins() {
  return {
      {"normal(0,1)", make_builtin(Normal{0.0, 1.0})},
      {"beta(1.3,2.4)", make_builtin(Beta{1.3, 2.4})},
      {"gamma(1.3,2.4)", make_builtin(Gamma{1.3, 2.4})},
      {"laplace(0,1)", make_builtin(Laplace{0.0, 1.0})},
      {"binomial(20,0.2)", make_builtin(Binomial{20, 0.2})},
      {"poisson(3)", make_builtin(Poisson{3.0})},
      {"hypergeometric(30,10,10)", make_builtin(Hypergeometric{30, 10, 10})},
  };
}

/// The five targets with closed-form pseudo-inverses.
std::vector<Named> core_five() {
  return {
      {"normal(0,1)", make_builtin(Normal{0.0, 1.0})},
      {"beta(1.3,2.4)", make_builtin(Beta{1.3, 2.4})},
      {"gamma(1.3,2.4)", make_builtin(Gamma{1.3, 2.4})},
      {"binomial(20,0.2)", make_builtin(Binomial{20, 0.2})},
      {"poisson(3)", make_builtin(Poisson{3.0})},
  };
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// 1. Closed-form pseudo-inverses of the identity.
CheckResult closed_form_inverses(const VerifyOptions&) {
  Tally t("1", "closed-form pseudo-inverses", 1e-8, 10.0);
  // Exact rational arithmetic on the binomial lattice.
  for (long n : {10L, 20L}) {
    const Rational p(1, 5);
    const auto table = exact_binomial(n, p);
    const lattice::Fn<Rational> id = [](long k) { return Rational(k); };
    const Rational mean = lattice::expect(table, id);
    for (long x = 0; x <= n; ++x) {
      const Rational plus = lattice::pseudo_inverse(table, Shift::forward(), id, mean, x);
      const Rational minus = lattice::pseudo_inverse(table, Shift::backward(), id, mean, x);
      t.require(plus == -(1 - p) * x, "binomial exact ell=+1 x=" + std::to_string(x));
      t.require(minus == -p * (n - x), "binomial exact ell=-1 x=" + std::to_string(x));
    }
  }
  struct Case {
    std::string name;
    Distribution dist;
    Shift ell;
    std::function<double(double)> closed;
  };
  const double a = 1.3, b = 2.4;
  std::vector<Case> cases = {
      {"binomial(20,0.2)", make_builtin(Binomial{20, 0.2}), Shift::forward(), [](double x) { return -0.8 * x; }},
      {"binomial(20,0.2)", make_builtin(Binomial{20, 0.2}), Shift::backward(),
       [](double x) { return -0.2 * (20.0 - x); }},
      {"poisson(3)", make_builtin(Poisson{3.0}), Shift::forward(), [](double x) { return -x; }},
      {"poisson(3)", make_builtin(Poisson{3.0}), Shift::backward(), [](double) { return -3.0; }},
      {"poisson(15)", make_builtin(Poisson{15.0}), Shift::backward(), [](double) { return -15.0; }},
      {"beta(1.3,2.4)", make_builtin(Beta{a, b}), Shift::differential(),
       [=](double x) { return -x * (1.0 - x) / (a + b); }},
      {"beta(8/9,1/3)", make_builtin(Beta{8.0 / 9.0, 1.0 / 3.0}), Shift::differential(),
       [](double x) { return -x * (1.0 - x) / (8.0 / 9.0 + 1.0 / 3.0); }},
      {"gamma(1.3,2.4)", make_builtin(Gamma{a, b}), Shift::differential(), [=](double x) { return -b * x; }},
      {"gamma(1/3,1/3)", make_builtin(Gamma{1.0 / 3.0, 1.0 / 3.0}), Shift::differential(),
       [](double x) { return -x / 3.0; }},
      {"normal(0,1)", make_builtin(Normal{0.0, 1.0}), Shift::differential(), [](double) { return -1.0; }},
      {"normal(1,2)", make_builtin(Normal{1.0, 2.0}), Shift::differential(), [](double) { return -2.0; }},
  };
  for (const auto& c : cases) {
    guarded(t, c.name, [&] {
      const OperatorResult l = pseudo_inverse(c.dist, c.ell, TestFunction::identity());
      for (double x : quantile_grid(c.dist)) t.deviation(std::abs(l(x) - c.closed(x)), at(c.name, c.ell, "L(id)", x));
    });
  }
  return t.finish();
}

// 2. Pseudo-inverse, kernel and double-integral forms of −L h agree.
CheckResult three_representations(const VerifyOptions& o) {
  Tally t("2", "three-representation agreement", 1e-6, 60.0);
  const std::vector<TestFunction> hs = {TestFunction::identity(), TestFunction::power(2),
                                        TestFunction::exponential(-0.5)};
  for (const auto& [name, d] : core_five()) {
    for (Shift ell : shifts_for(d)) {
      for (const auto& h : hs) {
        guarded(t, name + " " + h.label(), [&] {
          const OperatorResult l = pseudo_inverse(d, ell, h);
          const auto xs = quantile_grid(d);
          const auto direct = evaluate([&](double x) { return -l(x); }, xs, o.exec);
          const auto kern = evaluate([&](double x) { return inverse_via_kernel(d, ell, h, x); }, xs, o.exec);
          const auto dbl = evaluate([&](double x) { return inverse_via_double(d, ell, h, x); }, xs, o.exec);
          for (std::size_t i = 0; i < xs.size(); ++i) {
            const double dev = std::max({std::abs(direct[i] - kern[i]), std::abs(direct[i] - dbl[i]),
                                         std::abs(kern[i] - dbl[i])});
            t.deviation(dev, at(name, ell, h.label(), xs[i]));
          }
        });
      }
    }
  }
  return t.finish();
}

// 3. Klaassen sandwich for the worked examples and the Gaussian pair.
CheckResult klaassen_sandwich(const VerifyOptions&) {
  Tally t("3", "Klaassen sandwich", 1e-8);
  auto check = [&](const std::string& name, const Distribution& d, Shift ell, const std::optional<TestFunction>& c,
                   const std::vector<TestFunction>& fs) {
    for (const auto& f : fs) {
      guarded(t, name + " " + f.label(), [&] {
        const double var = cov_direct(d, f, f);
        const double lo = c ? klaassen_lower(d, ell, f, *c) : klaassen_lower_inverse(d, ell, f, TestFunction::identity());
        const double up = klaassen_upper(d, ell, f, TestFunction::identity());
        const std::string where = name + " ell=" + to_string(ell) + " f=" + f.label();
        t.slack(var - lo, where + " lower");
        t.slack(up - var, where + " upper");
      });
    }
  };
  const std::vector<TestFunction> lattice_fs = {TestFunction::identity(), TestFunction::power(2), TestFunction::power(3),
                                                TestFunction::sine(), TestFunction::indicator_le(3.0),
                                                TestFunction::exponential(-0.5)};
  for (auto [n, p] : {std::pair{10L, 0.3}, std::pair{20L, 0.2}, std::pair{7L, 0.5}}) {
    const auto d = make_builtin(Binomial{n, p});
    const std::string name = "binomial(" + std::to_string(n) + "," + fmt(p) + ")";
    check(name, d, Shift::forward(), TestFunction::identity(), lattice_fs);
    check(name, d, Shift::backward(), TestFunction::polynomial({-static_cast<double>(n), 1.0}), lattice_fs);
  }
  for (double lambda : {3.0, 0.5, 15.0}) {
    const auto d = make_builtin(Poisson{lambda});
    const std::string name = "poisson(" + fmt(lambda) + ")";
    check(name, d, Shift::forward(), TestFunction::identity(), lattice_fs);
    check(name, d, Shift::backward(), TestFunction::constant(-lambda), lattice_fs);
  }
  const std::vector<TestFunction> unit_fs = {TestFunction::identity(), TestFunction::power(2), TestFunction::power(3),
                                             TestFunction::sine(), TestFunction::exponential(-1.0)};
  for (auto [a, b] : {std::pair{1.3, 2.4}, std::pair{2.0, 3.0}, std::pair{8.0 / 9.0, 1.0 / 3.0}}) {
    check("beta(" + fmt(a) + "," + fmt(b) + ")", make_builtin(Beta{a, b}), Shift::differential(),
          TestFunction::polynomial({0.0, 1.0, -1.0}), unit_fs);
  }
  const std::vector<TestFunction> gauss_fs = {TestFunction::identity(), TestFunction::power(2), TestFunction::power(3),
                                              TestFunction::sine(), TestFunction::exponential(0.5),
                                              TestFunction::smoothed_indicator(0.0, 0.5)};
  for (auto [m, s2] : {std::pair{0.0, 1.0}, std::pair{1.0, 2.0}}) {
    check("normal(" + fmt(m) + "," + fmt(s2) + ")", make_builtin(Normal{m, s2}), Shift::differential(), std::nullopt,
          gauss_fs);
  }
  // Equality for f = Id on the Poisson law.
  for (double lambda : {3.0, 0.5}) {
    const auto d = make_builtin(Poisson{lambda});
    for (Shift ell : {Shift::forward(), Shift::backward()}) {
      guarded(t, "poisson equality", [&] {
        const auto r = klaassen_bounds(d, ell, TestFunction::identity());
        const std::string where = "poisson(" + fmt(lambda) + ") ell=" + to_string(ell) + " f=id";
        t.require(std::abs(r.lower - lambda) <= 1e-12 * lambda, where + " lower=" + format_double(r.lower));
        t.require(std::abs(r.upper - lambda) <= 1e-12 * lambda, where + " upper=" + format_double(r.upper));
      });
    }
  }
  return t.finish();
}

// 4. Γ₁ and Γ₂ against their closed forms.
CheckResult gamma_closed_forms(const VerifyOptions&) {
  Tally t("4", "Gamma_k closed forms", 1e-6);
  auto continuous = [&](const std::string& name, const Distribution& d, std::function<double(double)> g1,
                        std::function<double(double)> g2) {
    guarded(t, name, [&] {
      const ShiftSequence z(2, Shift::differential());
      const OperatorResult a = gamma_k(d, z, 1);
      const OperatorResult b = gamma_k(d, z, 2);
      for (double x : quantile_grid(d)) {
        t.deviation(rel(a(x), g1(x)), name + " Gamma_1 x=" + fmt(x));
        t.deviation(rel(b(x), g2(x)), name + " Gamma_2 x=" + fmt(x));
      }
    });
  };
  continuous("normal(0,1)", make_builtin(Normal{0.0, 1.0}), [](double) { return 1.0; }, [](double) { return 0.5; });
  {
    const double a = 1.3, b = 2.4, s = a + b;
    continuous("beta(1.3,2.4)", make_builtin(Beta{a, b}), [=](double x) { return x * (1 - x) / s; },
               [=](double x) { return x * x * (1 - x) * (1 - x) / (2 * s * (s + 1)); });
    continuous("gamma(1.3,2.4)", make_builtin(Gamma{a, b}), [=](double x) { return b * x; },
               [=](double x) { return 0.5 * b * b * x * x; });
  }
  continuous("laplace(0,1)", make_builtin(Laplace{0.0, 1.0}), [](double x) { return 1 + std::abs(x); },
             [](double x) { return 0.5 * x * x + std::abs(x) + 1; });

  // Lattice sign patterns; the binomial ones in exact arithmetic.
  const ShiftSequence patterns[4] = {{Shift(1), Shift(1)}, {Shift(1), Shift(-1)}, {Shift(-1), Shift(1)},
                                     {Shift(-1), Shift(-1)}};
  {
    const long n = 20;
    const Rational p(1, 5), q = 1 - p;
    const auto table = exact_binomial(n, p);
    auto closed = [&](int pattern, long x) -> Rational {
      switch (pattern) {
        case 0: return q * q * x * (x - 1) / 2;
        case 1:
        case 2: return p * q * x * (n - x) / 2;
        default: return p * p * (n - x - 1) * (n - x) / 2;
      }
    };
    std::vector<lattice::Fn<Rational>> ids(2, [](long k) { return Rational(k); });
    for (int i = 0; i < 4; ++i) {
      for (long x = 0; x <= n; ++x) {
        const auto& pat = patterns[i];
        const Rational g1 = lattice::gamma_nested(table, std::span<const Shift>(pat.data(), 1),
                                                  std::span<const lattice::Fn<Rational>>(ids.data(), 1), x);
        const Rational g2 = lattice::gamma_nested(table, std::span<const Shift>(pat), std::span<const lattice::Fn<Rational>>(ids), x);
        const Rational want1 = pat[0].value() == 1 ? q * x : p * (n - x);
        const std::string where = "binomial exact pattern " + to_string(pat[0]) + to_string(pat[1]) + " x=" + std::to_string(x);
        t.require(g1 == want1, where + " Gamma_1");
        t.require(g2 == closed(i, x), where + " Gamma_2");
        t.require(lattice::gamma_closed(table, std::span<const Shift>(pat), x) == g2, where + " factorized form");
      }
    }
    // The double path through gamma_k as well.
    const auto d = make_builtin(Binomial{n, 0.2});
    for (int i = 0; i < 4; ++i) {
      guarded(t, "binomial gamma_k", [&] {
        const OperatorResult g2 = gamma_k(d, patterns[i], 2);
        for (long x = 0; x <= n; ++x) {
          t.deviation(rel(g2(static_cast<double>(x)), to_double(closed(i, x))),
                      "binomial(20,0.2) pattern " + std::to_string(i) + " x=" + std::to_string(x));
        }
      });
    }
  }
  {
    const double lambda = 3.0;
    const auto d = make_builtin(Poisson{lambda});
    auto closed = [&](int pattern, double x) {
      switch (pattern) {
        case 0: return 0.5 * x * (x - 1);
        case 1:
        case 2: return 0.5 * lambda * x;
        default: return 0.5 * lambda * lambda;
      }
    };
    for (int i = 0; i < 4; ++i) {
      guarded(t, "poisson gamma_k", [&] {
        const OperatorResult g1 = gamma_k(d, patterns[i], 1);
        const OperatorResult g2 = gamma_k(d, patterns[i], 2);
        for (double x : quantile_grid(d)) {
          const double want1 = patterns[i][0].value() == 1 ? x : lambda;
          const std::string where = "poisson(3) pattern " + std::to_string(i) + " x=" + fmt(x);
          t.deviation(rel(g1(x), want1), where + " Gamma_1");
          t.deviation(rel(g2(x), closed(i, x)), where + " Gamma_2");
        }
      });
    }
  }
  return t.finish();
}

// 5. Expansion exactness and the sandwich.
CheckResult expansion_exactness(const VerifyOptions& o) {
  Tally t("5", "variance expansion exactness and sandwich", 1e-8);
  guarded(t, "normal x^4", [&] {
    const auto r = variance_expansion(make_builtin(Normal{0.0, 1.0}), TestFunction::power(4), 4,
                                      ShiftSequence(4, Shift::differential()));
    const double want[4] = {240.0, -216.0, 96.0, -24.0};
    for (int k = 0; k < 4; ++k) t.deviation(std::abs(r.terms[k] - want[k]), "normal x^4 T_" + std::to_string(k + 1));
    t.deviation(std::abs(r.partial_sums[3] - 96.0), "normal x^4 S_4");
    t.deviation(std::abs(r.oracle_variance - 96.0), "normal x^4 variance");
    const auto& s = r.partial_sums;
    t.slack(r.oracle_variance - s[1], "S_2 <= Var");
    t.slack(s[2] - r.oracle_variance, "Var <= S_3");
    t.slack(s[0] - s[2], "S_3 <= S_1");
    for (std::size_t i = 0; i < r.sandwich_holds.size(); ++i) {
      t.require(r.sandwich_holds[i], "sandwich flag n=" + std::to_string(i + 1));
    }
  });
  const std::vector<Named> targets = {
      {"normal(0,1)", make_builtin(Normal{0.0, 1.0})},
      {"normal(1,2)", make_builtin(Normal{1.0, 2.0})},
      {"gamma(3,0.25)", make_builtin(Gamma{3.0, 0.25})},
      {"gamma(2,0.5)", make_builtin(Gamma{2.0, 0.5})},
      {"beta(2,3)", make_builtin(Beta{2.0, 3.0})},
      {"beta(1.3,2.4)", make_builtin(Beta{1.3, 2.4})},
  };
  std::mt19937_64 rng(o.seed ^ 0x5eed0005ULL);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (const auto& [name, d] : targets) {
    for (int deg = 1; deg <= 4; ++deg) {
      for (int rep = 0; rep < 2; ++rep) {
        std::vector<double> c(static_cast<std::size_t>(deg) + 1);
        for (auto& v : c) v = coef(rng);
        if (rep == 0) std::fill(c.begin(), c.end() - 1, 0.0), c.back() = 1.0;
        const auto g = TestFunction::polynomial(c);
        guarded(t, name, [&] {
          const auto r = variance_expansion(d, g, deg, ShiftSequence(static_cast<std::size_t>(deg), Shift::differential()));
          t.deviation(std::abs(r.remainder_estimate), name + " degree " + std::to_string(deg) + " " + g.label());
        });
      }
    }
  }
  return t.finish();
}

// 6. Olkin-Shepp matrix bound on random polynomial pairs.
CheckResult olkin_shepp_random(const VerifyOptions& o) {
  Tally t("6", "Olkin-Shepp matrix bound", 1e-8, 120.0);
  std::mt19937_64 rng(o.seed ^ 0x5eed0006ULL);
  for (const auto& [name, d] : builtins()) {
    for (int i = 0; i < 50; ++i) {
      const auto f = random_polynomial(rng, 3);
      const auto g = random_polynomial(rng, 3);
      for (Shift ell : shifts_for(d)) {
        guarded(t, name, [&] {
          const auto r = olkin_shepp(d, ell, f, g, TestFunction::identity());
          const std::string where = name + " ell=" + to_string(ell) + " pair " + std::to_string(i);
          t.slack(r.diff_min_eigenvalue, where + " min eigenvalue");
          t.slack(r.det_inequality_slack, where + " determinant");
        });
      }
    }
  }
  return t.finish();
}

// 7. Two-dimensional Cauchy-Schwarz residual.
CheckResult matrix_cs_configs(const VerifyOptions& o) {
  Tally t("7", "matrix Cauchy-Schwarz residual", 1e-7);
  std::mt19937_64 rng(o.seed ^ 0x5eed0007ULL);
  const auto targets = builtins();
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  for (int i = 0; i < 20; ++i) {
    const auto& [name, d] = targets[static_cast<std::size_t>(i) % targets.size()];
    const auto a = random_polynomial(rng, 2);
    const auto b = random_polynomial(rng, 2);
    const auto f = random_polynomial(rng, 2);
    double u = d.quantile(unit(rng));
    double v = d.quantile(unit(rng));
    if (u > v) std::swap(u, v);
    const Shift ell = d.is_discrete() ? (i % 2 ? Shift::forward() : Shift::backward()) : Shift::differential();
    if (d.is_discrete()) {
      u -= 1.0;
      v += 1.0;
    }
    guarded(t, name, [&] {
      const auto r = matrix_cs_residual(d, ell, a, b, f, u, v);
      const std::string where = name + " config " + std::to_string(i) + " window (" + fmt(u) + "," + fmt(v) + ")";
      t.deviation(r.identity_error, where + " identity");
      const double scale = std::max(1.0, std::abs(r.residual[0][0]) + std::abs(r.residual[1][1]));
      t.require(r.residual_min_eigenvalue >= -1e-12 * scale,
                where + " residual min eigenvalue " + format_double(r.residual_min_eigenvalue));
    });
  }
  return t.finish();
}

// 8. Stein factors: R(0), the Mills chain and the sup-norm bound on L h.
CheckResult stein_factor_checks(const VerifyOptions& o) {
  Tally t("8", "Stein factors", 1e-4);
  guarded(t, "R(0)", [&] {
    t.deviation(std::abs(factor_R(make_builtin(Normal{0.0, 1.0}), Shift::differential(), 0.0) - 0.62666),
                "normal R(0)");
  });
  for (double x : linspace(0.0, 10.0, 200)) {
    const auto m = mills_bounds_gaussian(x);
    t.require(m.chain_holds(), "Mills chain x=" + fmt(x));
  }
  for (const auto& [name, d] : builtins()) {
    const double mu = d.mean();
    const double sd = std::sqrt(d.variance());
    const double med = d.is_discrete() ? std::floor(mu) : d.quantile(0.5);
    const std::vector<TestFunction> hs = {
        TestFunction::indicator_le(med),
        TestFunction::indicator_le(d.is_discrete() ? std::floor(mu - sd) : d.quantile(0.25)),
        TestFunction::smoothed_indicator(mu, 0.5 * sd),
        TestFunction::sine(),
        TestFunction::sine(std::numbers::pi / 2),
        custom("atan", [](double x) { return std::atan(x); }, [](double x) { return 1.0 / (1.0 + x * x); }),
        custom("exp(-x^2)", [](double x) { return std::exp(-x * x); },
               [](double x) { return -2.0 * x * std::exp(-x * x); }),
        TestFunction::constant(1.0),
        custom("1/(1+x^2)", [](double x) { return 1.0 / (1.0 + x * x); },
               [](double x) { return -2.0 * x / ((1.0 + x * x) * (1.0 + x * x)); }),
        custom("tanh", [mu, sd](double x) { return std::tanh((x - mu) / sd); },
               [mu, sd](double x) {
                 const double c = std::cosh((x - mu) / sd);
                 return 1.0 / (sd * c * c);
               }),
    };
    const auto xs = support_grid(d, 50);
    for (Shift ell : shifts_for(d)) {
      for (const auto& h : hs) {
        guarded(t, name + " " + h.label(), [&] {
          const double sup = sup_norm(d, h, xs);
          const auto ok = evaluate(
              [&](double x) {
                if (!(d.pdf(x) > 0.0)) return 1.0;
                return inverse_bound_check(d, ell, h, x, sup).holds ? 1.0 : 0.0;
              },
              xs, o.exec);
          for (std::size_t i = 0; i < xs.size(); ++i) {
            t.require(ok[i] == 1.0, at(name, ell, h.label(), xs[i]) + " sup-norm bound");
          }
        });
      }
    }
  }
  return t.finish();
}

// 9. Kernel Gram matrices and the Lebesgue closed form.
CheckResult kernel_properties(const VerifyOptions& o) {
  Tally t("9", "covariance kernel properties", 1e-10);
  for (const auto& [name, d] : builtins()) {
    const auto xs = support_grid(d, 12);
    for (Shift ell : shifts_for(d)) {
      guarded(t, name, [&] {
        const Eigen::MatrixXd k = kernel_matrix(d, ell, xs, o.exec);
        t.slack(min_eigenvalue(k), name + " ell=" + to_string(ell) + " Gram min eigenvalue");
      });
    }
    if (!d.is_discrete()) {
      for (double x : xs) {
        for (double y : xs) {
          if (x > y) continue;
          const double closed = d.cdf(x) * (1.0 - d.cdf(y));
          t.require(std::abs(kernel_K(d, Shift::differential(), x, y) - closed) <= 4e-16,
                    name + " K(" + fmt(x) + "," + fmt(y) + ") closed form");
        }
      }
    }
  }
  return t.finish();
}

// 10. Covariance identities and the natural-gradient identities.
CheckResult covariance_identities(const VerifyOptions&) {
  Tally t("10", "covariance identities", 1e-6);
  const std::vector<std::pair<TestFunction, TestFunction>> pairs = {
      {TestFunction::identity(), TestFunction::power(2)},
      {TestFunction::power(2), TestFunction::exponential(-0.5)},
      {TestFunction::exponential(-0.5), TestFunction::identity()},
      {TestFunction::power(2), TestFunction::power(2)},
  };
  for (const auto& [name, d] : core_five()) {
    for (Shift ell : shifts_for(d)) {
      for (const auto& [h, g] : pairs) {
        guarded(t, name + " " + h.label() + "," + g.label(), [&] {
          const double direct = cov_direct(d, h, g);
          const double inv = cov_via_inverse(d, ell, h, g);
          const double kern = cov_via_kernel(d, ell, h, g);
          const std::string where = name + " ell=" + to_string(ell) + " (" + h.label() + "," + g.label() + ")";
          t.deviation(std::abs(inv - direct), where + " inverse");
          t.deviation(std::abs(kern - direct), where + " kernel");
        });
      }
    }
  }
  {
    const long n = 10;
    const auto table = exact_binomial(n, Rational(1, 2));
    const std::vector<std::pair<std::string, lattice::Fn<Rational>>> gs = {
        {"x^2", [](long k) { return Rational(k * k); }},
        {"x^3", [](long k) { return Rational(k * k * k); }},
        {"1/(2+x)", [](long k) { return Rational(1, k + 2); }},
        {"2^-(x+1)", [](long k) { return Rational(1, 1L << (k + 1)); }},
    };
    for (const auto& [label, g] : gs) {
      const auto r = lattice::binomial_gradient(table, n, g);
      t.require(r.cov == r.rhs, "binomial(10,1/2) natural gradient g=" + label);
    }
  }
  {
    const auto d = make_builtin(Poisson{3.0});
    for (const auto& g : {TestFunction::power(2), TestFunction::power(3), TestFunction::sine(),
                          TestFunction::exponential(-0.5)}) {
      guarded(t, "poisson gradient", [&] {
        const auto r = natural_gradient_identity(d, g);
        t.require(std::abs(r.cov - r.rhs) <= 1e-10,
                  "poisson(3) natural gradient g=" + g.label() + " gap " + format_double(r.cov - r.rhs));
      });
    }
  }
  return t.finish();
}

}  // namespace

CheckResult run_acceptance(int criterion, const VerifyOptions& options) {
  switch (criterion) {
    case 1: return closed_form_inverses(options);
    case 2: return three_representations(options);
    case 3: return klaassen_sandwich(options);
    case 4: return gamma_closed_forms(options);
    case 5: return expansion_exactness(options);
    case 6: return olkin_shepp_random(options);
    case 7: return matrix_cs_configs(options);
    case 8: return stein_factor_checks(options);
    case 9: return kernel_properties(options);
    case 10: return covariance_identities(options);
    default: fail(ErrorCode::InvalidParameter, "no acceptance criterion " + std::to_string(criterion));
  }
}

std::vector<CheckResult> acceptance_suite(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  for (int i = 1; i <= kAcceptanceCount; ++i) out.push_back(run_acceptance(i, options));
  return out;
}

std::vector<CheckResult> invariant_suite(const VerifyOptions& o) {
  std::vector<CheckResult> out;
  {
    Tally t("I1", "builtin normalization and moments", 1e-8);
    for (const auto& [name, d] : builtins()) {
      guarded(t, name, [&] {
        const auto diag = validate(d);
        t.deviation(diag.normalization_error * 100.0, name + " mass");
        t.deviation(std::abs(expect(d, [](double x) { return x; }).value - d.mean()), name + " mean");
        t.require(diag.ok(), name + " diagnostics");
      });
    }
    out.push_back(t.finish());
  }
  {
    Tally t("I2", "T(L h) = h - E h", 1e-6);
    for (const auto& [name, d] : core_five()) {
      for (Shift ell : shifts_for(d)) {
        for (const auto& h : {TestFunction::power(2), TestFunction::sine()}) {
          guarded(t, name, [&] {
            const double mh = mean_of(d, h);
            const OperatorResult l = pseudo_inverse(d, ell, h);
            const OperatorResult tl = canonical_op(d, ell, l.as_test_function());
            for (double x : quantile_grid(d, 12)) {
              if (d.is_discrete() && ell.value() == -1 && x == d.effective_support().upper) continue;
              const double scale = std::max(1.0, std::abs(h(x)));
              t.deviation(std::abs(tl(x) - (h(x) - mh)) / scale, at(name, ell, h.label(), x));
            }
          });
        }
      }
    }
    out.push_back(t.finish());
  }
  {
    Tally t("I3", "Stein kernel and monotone sign constancy", 0.0);
    for (const auto& [name, d] : builtins()) {
      for (Shift ell : shifts_for(d)) {
        guarded(t, name, [&] {
          const auto s = sign_constancy_check(d, ell, TestFunction::identity(), {}, 100);
          t.require(s.constant && s.sign <= 0, name + " ell=" + to_string(ell) + " L(id) <= 0");
          const auto e = sign_constancy_check(d, ell, TestFunction::smoothed_indicator(d.mean(), 1.0), {}, 100);
          t.require(e.constant, name + " ell=" + to_string(ell) + " decreasing h");
        });
      }
    }
    out.push_back(t.finish());
  }
  {
    Tally t("I4", "Lagrange identity", 1e-8);
    std::mt19937_64 rng(o.seed ^ 0x5eed0104ULL);
    for (const auto& [name, d] : builtins()) {
      for (Shift ell : shifts_for(d)) {
        const auto a = random_polynomial(rng, 2);
        const auto b = random_polynomial(rng, 2);
        const double u = d.quantile(0.1) - (d.is_discrete() ? 1.0 : 0.0);
        const double v = d.quantile(0.9) + (d.is_discrete() ? 1.0 : 0.0);
        guarded(t, name, [&] {
          const auto r = lagrange_residual(d, ell, a, b, u, v);
          t.deviation(std::abs(r.identity_error()) / std::max(1.0, r.product), name + " identity");
          t.slack(r.remainder, name + " remainder >= 0");
          const auto z = lagrange_residual(d, ell, a, a, u, v);
          t.deviation(std::abs(z.remainder), name + " a = b");
        });
      }
    }
    out.push_back(t.finish());
  }
  {
    Tally t("I5", "expansion sandwich parity on lattices", 1e-8);
    const ShiftSequence seqs[] = {{Shift(1), Shift(1), Shift(1)}, {Shift(1), Shift(-1), Shift(1)},
                                  {Shift(-1), Shift(1), Shift(-1)}, {Shift(-1), Shift(-1), Shift(-1)}};
    for (const auto& [name, d] : builtins()) {
      if (!d.is_discrete()) continue;
      for (const auto& seq : seqs) {
        for (const auto& g : {TestFunction::sine(), TestFunction::power(3), TestFunction::exponential(-0.5)}) {
          guarded(t, name, [&] {
            const auto r = variance_expansion(d, g, 3, seq);
            for (std::size_t i = 0; i < r.sandwich_holds.size(); ++i) {
              t.require(r.sandwich_holds[i], name + " " + g.label() + " n=" + std::to_string(i + 1));
            }
          });
        }
      }
    }
    out.push_back(t.finish());
  }
  {
    Tally t("I6", "Monte Carlo remainder within 5 standard errors", 5.0);
    guarded(t, "normal sin", [&] {
      const auto d = make_builtin(Normal{0.0, 1.0});
      const std::vector<TestFunction> ids(1, TestFunction::identity());
      const auto mc = remainder_monte_carlo(d, TestFunction::sine(), 1, ShiftSequence(1, Shift(0)), ids,
                                            {o.seed, 400'000});
      const double exact = 0.5 * (1.0 + std::exp(-2.0)) - 0.5 * (1.0 - std::exp(-2.0));
      t.deviation(std::abs(mc.value - exact) / mc.std_error, "normal sin R_1");
    });
    guarded(t, "binomial", [&] {
      const auto d = make_builtin(Binomial{10, 0.3});
      const ShiftSequence seq{Shift(1), Shift(-1)};
      const std::vector<TestFunction> ids(2, TestFunction::identity());
      const auto mc = remainder_monte_carlo(d, TestFunction::power(3), 2, seq, ids, {o.seed, 2'000'000});
      const auto r = variance_expansion(d, TestFunction::power(3), 2, seq);
      t.deviation(std::abs(mc.value - r.remainder_estimate) / mc.std_error, "binomial x^3 R_2");
    });
    out.push_back(t.finish());
  }
  {
    Tally t("I7", "Gaussian R maximal at 0", 1e-9);
    const auto d = make_builtin(Normal{0.0, 1.0});
    const auto p = factor_profile(d, Shift::differential(), linspace(-6.0, 6.0, 1201), o.exec);
    t.slack(factor_R(d, Shift::differential(), 0.0) - p.sup_on_grid, "sup over grid");
    for (const auto& [name, dd] : builtins()) {
      for (Shift ell : shifts_for(dd)) {
        const auto q = factor_profile(dd, ell, support_grid(dd, 50), o.exec);
        for (double v : q.values) t.require(v >= 0.0, name + " R >= 0");
      }
    }
    out.push_back(t.finish());
  }
  {
    Tally t("I8", "report JSON round-trip", 0.0);
    guarded(t, "round-trip", [&] {
      const auto d = make_builtin(Poisson{3.0});
      const auto b = klaassen_bounds(d, Shift::backward(), TestFunction::power(2));
      const BoundReport b2 = nlohmann::json(b).get<BoundReport>();
      t.require(nlohmann::json(b2) == nlohmann::json(b), "bound report");
      ExpansionOptions eo;
      eo.monte_carlo = MonteCarloConfig{o.seed, 1000};
      const auto e = variance_expansion(make_builtin(Normal{0.0, 1.0}), TestFunction::power(3), 3,
                                        ShiftSequence(3, Shift(0)), eo);
      const auto e2 = nlohmann::json(e).get<ExpansionReport>();
      t.require(nlohmann::json(e2) == nlohmann::json(e), "expansion report");
      t.require(e2.terms == e.terms && e2.partial_sums == e.partial_sums, "expansion values bitwise");
      const auto m = olkin_shepp(d, Shift::forward(), TestFunction::power(2), TestFunction::sine(), TestFunction::identity());
      t.require(nlohmann::json(nlohmann::json(m).get<MatrixBoundReport>()) == nlohmann::json(m), "matrix report");
      const auto f = factor_profile(d, Shift::forward(), support_grid(d, 20));
      t.require(nlohmann::json(nlohmann::json(f).get<FactorProfile>()) == nlohmann::json(f), "factor profile");
    });
    out.push_back(t.finish());
  }
  {
    Tally t("I9", "serial and parallel kernels agree", 0.0);
    for (const auto& [name, d] : builtins()) {
      guarded(t, name, [&] {
        const Shift ell = shifts_for(d).front();
        const auto xs = support_grid(d, 40);
        const OperatorResult l = pseudo_inverse(d, ell, TestFunction::power(2));
        auto fn = [&](double x) { return l(x); };
        t.require(evaluate(fn, xs, Execution::Serial) == evaluate(fn, xs, Execution::Parallel), name + " evaluate");
        t.require(kernel_matrix(d, ell, xs, Execution::Serial) == kernel_matrix(d, ell, xs, Execution::Parallel),
                  name + " kernel matrix");
      });
    }
    out.push_back(t.finish());
  }
  return out;
}

std::string format_check(const CheckResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << "  worst=" << fmt(r.worst)
    << " threshold=" << fmt(r.threshold) << " cases=" << r.cases << " time=" << fmt(r.seconds) << "s";
  if (r.time_limit > 0.0) s << " (limit " << fmt(r.time_limit) << "s)";
  if (!r.detail.empty()) s << "  -- " << r.detail;
  return s.str();
}

}  // namespace steinvar
