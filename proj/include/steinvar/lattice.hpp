#pragma once

// Lattice (counting-measure) kernels, written once over the scalar type so the
// same code runs in double precision and in exact rational arithmetic.

#include "steinvar/errors.hpp"
#include "steinvar/numerics.hpp"
#include "steinvar/shift.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace steinvar {

template <class S>
class Accumulator {
 public:
  void add(const S& v) { sum_ += v; }
  S value() const { return sum_; }

 private:
  S sum_{0};
};

template <>
class Accumulator<double> {
 public:
  void add(double v) { sum_.add(v); }
  double value() const { return sum_.value(); }

 private:
  CompensatedSum sum_;
};

/// Probability mass function on {lo, ..., hi} with cumulative sums in both
/// directions. Mass cut off beyond either end is kept in the tail fields so
/// cdf/sf stay calibrated.
template <class S>
class LatticeTable {
 public:
  LatticeTable() = default;
  LatticeTable(long lo, std::vector<S> pmf, S lower_tail = S(0), S upper_tail = S(0))
      : lo_(lo), pmf_(std::move(pmf)), lower_tail_(lower_tail), upper_tail_(upper_tail) {
    if (pmf_.empty()) fail(ErrorCode::InvalidParameter, "empty lattice table");
    const std::size_t n = pmf_.size();
    cdf_.resize(n);
    sf_.resize(n);
    Accumulator<S> up;
    up.add(lower_tail_);
    for (std::size_t i = 0; i < n; ++i) {
      if (pmf_[i] < S(0)) fail(ErrorCode::InvalidParameter, "negative mass in lattice table");
      up.add(pmf_[i]);
      cdf_[i] = up.value();
    }
    Accumulator<S> down;
    down.add(upper_tail_);
    for (std::size_t i = n; i-- > 0;) {
      sf_[i] = down.value();
      down.add(pmf_[i]);
    }
  }

  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(pmf_.size()) - 1; }
  std::size_t size() const { return pmf_.size(); }
  bool in_range(long k) const { return k >= lo_ && k <= hi(); }
  const std::vector<S>& masses() const { return pmf_; }
  S lower_tail() const { return lower_tail_; }
  S upper_tail() const { return upper_tail_; }

  S pmf(long k) const { return in_range(k) ? pmf_[static_cast<std::size_t>(k - lo_)] : S(0); }
  /// P(X ≤ k)
  S cdf(long k) const {
    if (k < lo_) return lower_tail_;
    if (k >= hi()) return cdf_.back() + (k > hi() ? upper_tail_ : S(0));
    return cdf_[static_cast<std::size_t>(k - lo_)];
  }
  /// P(X > k)
  S sf(long k) const {
    if (k < lo_) return sf_.front() + pmf_.front();
    if (k > hi()) return S(0);
    return sf_[static_cast<std::size_t>(k - lo_)];
  }
  S total() const { return cdf_.back() + upper_tail_; }

 private:
  long lo_ = 0;
  std::vector<S> pmf_;
  std::vector<S> cdf_;
  std::vector<S> sf_;
  S lower_tail_{0};
  S upper_tail_{0};
};

namespace lattice {

template <class S>
using Fn = std::function<S(long)>;

template <class S, class F>
S expect(const LatticeTable<S>& t, const F& f) {
  Accumulator<S> acc;
  for (long k = t.lo(); k <= t.hi(); ++k) acc.add(f(k) * t.pmf(k));
  return acc.value();
}

/// Δ^ℓ f(x) for ℓ = ±1: forward difference, or f(x) − f(x−1).
template <class S, class F>
S difference(Shift ell, const F& f, long x) {
  if (ell.value() == 1) return S(f(x + 1)) - S(f(x));
  if (ell.value() == -1) return S(f(x)) - S(f(x - 1));
  fail(ErrorCode::UnsupportedSupport, "lattice differences need ell = +1 or -1");
}

/// Δ^ℓ(f p)(x) / p(x); zero off the support.
template <class S, class F>
S canonical(const LatticeTable<S>& t, Shift ell, const F& f, long x) {
  const S px = t.pmf(x);
  if (px == S(0)) return S(0);
  const int l = ell.value();
  if (l == 0) fail(ErrorCode::UnsupportedSupport, "lattice operator needs ell = +1 or -1");
  const S next = t.pmf(x + l) == S(0) ? S(0) : S(f(x + l)) * t.pmf(x + l);
  return (next - S(f(x)) * px) / (S(l) * px);
}

/// (1/p(x)) Σ_y χ^ℓ(y, x) (h(y) − m) p(y). In floating point the complementary
/// upper sum is used once the lower sum carries more than half the mass.
template <class S, class F>
S pseudo_inverse(const LatticeTable<S>& t, Shift ell, const F& h, const S& mean_h, long x) {
  const S px = t.pmf(x);
  if (px == S(0)) return S(0);
  const long cut = x - ell.chi_offset();
  bool from_above = false;
  if constexpr (std::is_floating_point_v<S>) from_above = t.cdf(cut) > S(0.5);
  Accumulator<S> acc;
  if (!from_above) {
    for (long y = t.lo(); y <= std::min(cut, t.hi()); ++y) acc.add((S(h(y)) - mean_h) * t.pmf(y));
    return acc.value() / px;
  }
  for (long y = std::max(cut + 1, t.lo()); y <= t.hi(); ++y) acc.add((S(h(y)) - mean_h) * t.pmf(y));
  return -acc.value() / px;
}

/// K^ℓ(x, y) = P(min − s) · P̄(max − s) with s = ℓ(ℓ+1)/2.
template <class S>
S kernel(const LatticeTable<S>& t, Shift ell, long x, long y) {
  const long s = ell.chi_offset();
  return t.cdf(std::min(x, y) - s) * t.sf(std::max(x, y) - s);
}

/// −L h(x) through the covariance kernel: (1/p(x)) Σ_y K(y, x) Δ^{−ℓ}h(y).
template <class S, class F>
S inverse_via_kernel(const LatticeTable<S>& t, Shift ell, const F& h, long x) {
  const S px = t.pmf(x);
  if (px == S(0)) return S(0);
  Accumulator<S> acc;
  for (long y = t.lo(); y <= t.hi(); ++y) {
    const S k = kernel(t, ell, y, x);
    if (k != S(0)) acc.add(k * difference<S>(ell.opposite(), h, y));
  }
  return acc.value() / px;
}

/// −L h(x) as E[(h(X₂) − h(X₁)) χ^ℓ(X₁, x) χ^{−ℓ}(x, X₂)] / p(x), summed pairwise.
template <class S, class F>
S inverse_via_double(const LatticeTable<S>& t, Shift ell, const F& h, long x) {
  const S px = t.pmf(x);
  if (px == S(0)) return S(0);
  Accumulator<S> acc;
  for (long a = t.lo(); a <= t.hi(); ++a) {
    if (!chi(ell, a, x)) continue;
    const S ha = S(h(a));
    for (long b = t.lo(); b <= t.hi(); ++b) {
      if (!chi(ell.opposite(), x, b)) continue;
      acc.add((S(h(b)) - ha) * t.pmf(a) * t.pmf(b));
    }
  }
  return acc.value() / px;
}

template <class S, class F, class G>
S covariance(const LatticeTable<S>& t, const F& h, const G& g) {
  const S mh = expect(t, h);
  const S mg = expect(t, g);
  return expect(t, [&](long k) { return (S(h(k)) - mh) * (S(g(k)) - mg); });
}

/// E[−L h(X) Δ^{−ℓ}g(X)].
template <class S, class F, class G>
S cov_via_inverse(const LatticeTable<S>& t, Shift ell, const F& h, const G& g) {
  const S mh = expect(t, h);
  return expect(t, [&](long k) {
    return -pseudo_inverse(t, ell, h, mh, k) * difference<S>(ell.opposite(), g, k);
  });
}

/// Σ_x Σ_y Δ^{−ℓ}h(x) K(x, y) Δ^{−ℓ}g(y).
template <class S, class F, class G>
S cov_via_kernel(const LatticeTable<S>& t, Shift ell, const F& h, const G& g) {
  Accumulator<S> acc;
  for (long x = t.lo(); x <= t.hi(); ++x) {
    const S dh = difference<S>(ell.opposite(), h, x);
    if (dh == S(0)) continue;
    for (long y = t.lo(); y <= t.hi(); ++y) {
      const S k = kernel(t, ell, x, y);
      if (k != S(0)) acc.add(dh * k * difference<S>(ell.opposite(), g, y));
    }
  }
  return acc.value();
}

/// E[(g(X₂) − g(X₁))² 𝕀[X₁ < X₂]].
template <class S, class G>
S variance_pair(const LatticeTable<S>& t, const G& g) {
  Accumulator<S> acc;
  for (long a = t.lo(); a <= t.hi(); ++a) {
    for (long b = a + 1; b <= t.hi(); ++b) {
      const S d = S(g(b)) - S(g(a));
      acc.add(d * d * t.pmf(a) * t.pmf(b));
    }
  }
  return acc.value();
}

/// Support points x with χ^ℓ(u, x) χ^{−ℓ}(x, v) = 1.
template <class S>
std::pair<long, long> window(const LatticeTable<S>& t, Shift ell, double u, double v) {
  const long first = std::max<long>(t.lo(), static_cast<long>(std::ceil(u + ell.chi_offset())));
  const long last = std::min<long>(t.hi(), static_cast<long>(std::floor(v - ell.opposite().chi_offset())));
  return {first, last};
}

template <class S>
struct LagrangePieces {
  S lhs_sq{0};
  S product{0};
  S remainder{0};
};

/// E[abΦ]², E[a²Φ]E[b²Φ] and E[(a₁b₂ − a₂b₁)² Φ₄] for the window (u, v).
template <class S, class A, class B>
LagrangePieces<S> lagrange(const LatticeTable<S>& t, Shift ell, const A& a, const B& b, double u, double v) {
  const auto [first, last] = window(t, ell, u, v);
  Accumulator<S> ab, aa, bb, rem;
  for (long x = first; x <= last; ++x) {
    if (t.pmf(x) == S(0)) continue;
    const S ax = S(a(x));
    const S bx = S(b(x));
    ab.add(ax * bx);
    aa.add(ax * ax);
    bb.add(bx * bx);
    for (long y = x; y <= last; ++y) {
      if (!chi(ell.squared(), x, y) || t.pmf(y) == S(0)) continue;
      const S w = ax * S(b(y)) - S(a(y)) * bx;
      rem.add(w * w);
    }
  }
  LagrangePieces<S> out;
  out.lhs_sq = ab.value() * ab.value();
  out.product = aa.value() * bb.value();
  out.remainder = rem.value();
  return out;
}

template <class S>
using Mat2 = std::array<std::array<S, 2>, 2>;

template <class S>
struct MatrixCsPieces {
  Mat2<S> lhs{};
  Mat2<S> rhs{};
  Mat2<S> residual{};
};

/// Two-dimensional Cauchy–Schwarz on the window (u, v) with v = (a, b):
/// lhs = E[v f Φ] E[v f Φ]ᵀ, rhs = E[v vᵀ Φ] E[f² Φ], residual = E[w wᵀ Φ₄]
/// with w = (a₁f₂ − a₂f₁, b₁f₂ − b₂f₁).
template <class S, class A, class B, class F>
MatrixCsPieces<S> matrix_cs(const LatticeTable<S>& t, Shift ell, const A& a, const B& b, const F& f, double u,
                            double v) {
  const auto [first, last] = window(t, ell, u, v);
  Accumulator<S> af, bf, aa, ab, bb, ff, r00, r01, r11;
  for (long x = first; x <= last; ++x) {
    if (t.pmf(x) == S(0)) continue;
    const S ax = S(a(x)), bx = S(b(x)), fx = S(f(x));
    af.add(ax * fx);
    bf.add(bx * fx);
    aa.add(ax * ax);
    ab.add(ax * bx);
    bb.add(bx * bx);
    ff.add(fx * fx);
    for (long y = x; y <= last; ++y) {
      if (!chi(ell.squared(), x, y) || t.pmf(y) == S(0)) continue;
      const S ay = S(a(y)), by = S(b(y)), fy = S(f(y));
      const S w0 = ax * fy - ay * fx;
      const S w1 = bx * fy - by * fx;
      r00.add(w0 * w0);
      r01.add(w0 * w1);
      r11.add(w1 * w1);
    }
  }
  MatrixCsPieces<S> out;
  const S m0 = af.value(), m1 = bf.value(), q = ff.value();
  out.lhs = {{{m0 * m0, m0 * m1}, {m1 * m0, m1 * m1}}};
  out.rhs = {{{aa.value() * q, ab.value() * q}, {ab.value() * q, bb.value() * q}}};
  out.residual = {{{r00.value(), r01.value()}, {r01.value(), r11.value()}}};
  return out;
}

template <class S>
struct IdentitySides {
  S cov{0};
  S rhs{0};
};

/// Cov[X, g(X)] and Var[X]·E[∇g(X)] with ∇g = (x/n)Δ⁻g + ((n−x)/n)Δ⁺g.
template <class S, class G>
IdentitySides<S> binomial_gradient(const LatticeTable<S>& t, long n, const G& g) {
  auto id = [](long k) { return S(k); };
  const S var = covariance(t, id, id);
  const S grad = expect(t, [&](long x) {
    return S(x) / S(n) * difference<S>(Shift::backward(), g, x) +
           S(n - x) / S(n) * difference<S>(Shift::forward(), g, x);
  });
  return {covariance(t, id, g), var * grad};
}

/// Cov[X, g(X)] and Var[X]·E[∇g(X)] with ∇g = ((x/λ)Δ⁻g + Δ⁺g)/2.
template <class S, class G>
IdentitySides<S> poisson_gradient(const LatticeTable<S>& t, const S& lambda, const G& g) {
  auto id = [](long k) { return S(k); };
  const S var = covariance(t, id, id);
  const S grad = expect(t, [&](long x) {
    return (S(x) / lambda * difference<S>(Shift::backward(), g, x) + difference<S>(Shift::forward(), g, x)) / S(2);
  });
  return {covariance(t, id, g), var * grad};
}

/// E[c Δ^{−ℓ}f]² / E[(T^ℓ c)²].
template <class S, class F, class C>
S klaassen_lower(const LatticeTable<S>& t, Shift ell, const F& f, const C& c) {
  const S num = expect(t, [&](long x) { return S(c(x)) * difference<S>(ell.opposite(), f, x); });
  const S den = expect(t, [&](long x) {
    const S tc = canonical(t, ell, c, x);
    return tc * tc;
  });
  if (den == S(0)) fail(ErrorCode::DegenerateDenominator, "E[(T c)^2] vanishes");
  return num * num / den;
}

/// E[(Δ^{−ℓ}f)² (−L h)/Δ^{−ℓ}h]; raises SignViolation on a negative weight.
template <class S, class F, class H>
S klaassen_upper(const LatticeTable<S>& t, Shift ell, const F& f, const H& h) {
  const S mh = expect(t, h);
  return expect(t, [&](long x) {
    const S num = -pseudo_inverse(t, ell, h, mh, x);
    const S den = difference<S>(ell.opposite(), h, x);
    if (num == S(0)) return S(0);
    if (den == S(0)) fail(ErrorCode::DegenerateDenominator, "difference of h vanishes on the support");
    const S w = num / den;
    if (w < S(0)) {
      bool tiny = false;
      if constexpr (std::is_floating_point_v<S>) tiny = -w < 1e-12 * (1.0 + std::abs(num));
      if (!tiny) fail(ErrorCode::SignViolation, "negative weight -L h / difference of h");
      return S(0);
    }
    const S df = difference<S>(ell.opposite(), f, x);
    return df * df * w;
  });
}

/// a^{⌈m⌉} = a(a+1)…(a+m−1).
template <class S>
S rising(const S& a, int m) {
  S out(1);
  for (int i = 0; i < m; ++i) out *= a + S(i);
  return out;
}

/// Γ_k(x) with standardizers h_1..h_k by direct evaluation of the nested
/// expectation. Every level of the nesting is a sum of two products of one
/// variable functions, so each level costs one prefix/suffix pass.
template <class S>
S gamma_nested(const LatticeTable<S>& t, std::span<const Shift> ells, std::span<const Fn<S>> hs, long x) {
  const std::size_t k = ells.size();
  if (k == 0 || hs.size() != k) fail(ErrorCode::InvalidParameter, "gamma needs k >= 1 shifts and standardizers");
  const S px = t.pmf(x);
  if (px == S(0)) return S(0);
  const long lo = t.lo();
  const std::size_t n = t.size();
  auto at = [lo](long v) { return static_cast<std::size_t>(v - lo); };

  const Shift last = ells[k - 1];
  std::array<std::vector<S>, 2> left{std::vector<S>(n, S(0)), std::vector<S>(n, S(0))};
  std::array<std::vector<S>, 2> right{std::vector<S>(n, S(0)), std::vector<S>(n, S(0))};
  for (long y = lo; y <= t.hi(); ++y) {
    if (t.pmf(y) == S(0)) continue;
    if (chi(last, y, x)) {
      left[0][at(y)] = S(1);
      left[1][at(y)] = -S(hs[k - 1](y));
    }
    if (chi(last.opposite(), x, y)) {
      right[0][at(y)] = S(hs[k - 1](y));
      right[1][at(y)] = S(1);
    }
  }

  for (std::size_t i = k - 1; i-- > 0;) {
    const Shift ell = ells[i];
    std::vector<S> w(n, S(0));
    for (long y = lo; y <= t.hi(); ++y) {
      if (t.pmf(y) != S(0)) w[at(y)] = difference<S>(ell.opposite(), hs[i], y);
    }
    const long s_left = ell.chi_offset();
    const long s_right = ell.opposite().chi_offset();
    for (int r = 0; r < 2; ++r) {
      // suffix[j] = Σ_{c ≥ j} w F(c), prefix[j] = Σ_{d ≤ j} w G(d)
      std::vector<S> suffix(n + 1, S(0));
      for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + w[j] * left[r][j];
      std::vector<S> prefix(n, S(0));
      S run(0);
      for (std::size_t j = 0; j < n; ++j) {
        run += w[j] * right[r][j];
        prefix[j] = run;
      }
      std::vector<S> new_left(n, S(0)), new_right(n, S(0));
      for (long y = lo; y <= t.hi(); ++y) {
        if (t.pmf(y) == S(0)) continue;
        const long from = y + s_left;
        if (from <= t.hi()) new_left[at(y)] = suffix[at(std::max(from, lo))];
        const long upto = y - s_right;
        if (upto >= lo) new_right[at(y)] = prefix[at(std::min(upto, t.hi()))];
      }
      left[r] = std::move(new_left);
      right[r] = std::move(new_right);
    }
  }

  S total(0);
  for (int r = 0; r < 2; ++r) {
    Accumulator<S> el, er;
    for (long y = lo; y <= t.hi(); ++y) {
      el.add(t.pmf(y) * left[r][at(y)]);
      er.add(t.pmf(y) * right[r][at(y)]);
    }
    total += el.value() * er.value();
  }
  return total / px;
}

/// p(x) Γ_k(x) for h_i = Id in closed form:
/// E[(x − X₁ − A + 1)^{⌈k−1⌉} (X₂ − x + B + 1)^{⌈k−1⌉} (X₂ − X₁) 𝕀[X₁ + A ≤ x ≤ X₂ + B]] / (k!(k−1)!)
/// with A the number of forward shifts and B minus the number of backward shifts.
template <class S>
S weighted_gamma_closed(const LatticeTable<S>& t, std::span<const Shift> ells, long x) {
  const int k = static_cast<int>(ells.size());
  if (k == 0) fail(ErrorCode::InvalidParameter, "gamma needs k >= 1");
  long A = 0, B = 0;
  for (Shift l : ells) {
    A += l.value() * (l.value() + 1) / 2;
    B += l.value() * (1 - l.value()) / 2;
  }
  S norm(1);
  for (int i = 2; i <= k; ++i) norm *= S(i);
  for (int i = 2; i <= k - 1; ++i) norm *= S(i);
  Accumulator<S> left_w, left_wx, right_w, right_wx;
  // The double sum factorizes once (X₂ − X₁) is split.
  for (long a = t.lo(); a <= std::min(t.hi(), x - A); ++a) {
    const S w = t.pmf(a) * rising(S(x - a - A + 1), k - 1);
    left_w.add(w);
    left_wx.add(w * S(a));
  }
  for (long b = std::max(t.lo(), x - B); b <= t.hi(); ++b) {
    const S w = t.pmf(b) * rising(S(b - x + B + 1), k - 1);
    right_w.add(w);
    right_wx.add(w * S(b));
  }
  const S value = right_wx.value() * left_w.value() - left_wx.value() * right_w.value();
  return value / norm;
}

template <class S>
S gamma_closed(const LatticeTable<S>& t, std::span<const Shift> ells, long x) {
  const S px = t.pmf(x);
  if (px == S(0)) return S(0);
  return weighted_gamma_closed(t, ells, x) / px;
}

/// Unsigned expansion terms E[(Δ^{−ℓ_k} g_{k−1}(X))² Γ_k(X)], k = 1..n, with
/// h_i = Id and g_k = Δ^{−ℓ_k} g_{k−1}. Throws UnsupportedOrder once Γ_k
/// vanishes on the whole support.
template <class S, class G>
std::vector<S> expansion_terms(const LatticeTable<S>& t, std::span<const Shift> ells, const G& g, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > ells.size()) {
    fail(ErrorCode::InvalidParameter, "expansion order must be between 1 and the number of shifts");
  }
  // g_k on [lo − n, hi + n]; each difference reaches one step further out.
  const long lo = t.lo() - n;
  const long hi = t.hi() + n;
  std::vector<S> cur(static_cast<std::size_t>(hi - lo + 1));
  for (long x = lo; x <= hi; ++x) cur[static_cast<std::size_t>(x - lo)] = S(g(x));
  std::vector<S> terms;
  for (int k = 1; k <= n; ++k) {
    const Shift back = ells[static_cast<std::size_t>(k - 1)].opposite();
    std::vector<S> next(cur.size(), S(0));
    for (long x = lo + 1; x < hi; ++x) {
      const auto i = static_cast<std::size_t>(x - lo);
      next[i] = back.value() > 0 ? cur[i + 1] - cur[i] : cur[i] - cur[i - 1];
    }
    cur = std::move(next);
    const auto prefix = ells.first(static_cast<std::size_t>(k));
    Accumulator<S> acc;
    bool any = false;
    for (long x = t.lo(); x <= t.hi(); ++x) {
      if (t.pmf(x) == S(0)) continue;
      const S w = weighted_gamma_closed(t, prefix, x);
      if (w == S(0)) continue;
      any = true;
      const S d = cur[static_cast<std::size_t>(x - lo)];
      acc.add(d * d * w);
    }
    if (!any) fail(ErrorCode::UnsupportedOrder, "Γ_" + std::to_string(k) + " vanishes on the whole support");
    terms.push_back(acc.value());
  }
  return terms;
}

}  // namespace lattice
}  // namespace steinvar
