// Seeded randomized checks of the structural identities on random targets and
// random test functions.
#include "steinvar/bounds.hpp"
#include "steinvar/exact.hpp"
#include "steinvar/grid.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace steinvar;

namespace {

constexpr int kTrials = 20;

std::vector<Rational> random_masses(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> w(0, 9);
  std::vector<Rational> m(n);
  Rational total = 0;
  for (auto& v : m) {
    v = Rational(w(rng) + 1);
    total += v;
  }
  for (auto& v : m) v /= total;
  return m;
}

std::vector<long> random_coefficients(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<long> c(-5, 5);
  std::vector<long> out(degree + 1);
  for (auto& v : out) v = c(rng);
  return out;
}

Rational horner(const std::vector<long>& c, long x) {
  Rational acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

TestFunction poly(const std::vector<long>& c) { return TestFunction::polynomial({c.begin(), c.end()}); }

}  // namespace

TEST(Property, LatticeInverseIsExactOnRandomTables) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto table = exact_table(-3, random_masses(rng, 4 + trial % 7));
    const auto c = random_coefficients(rng, 3);
    const lattice::Fn<Rational> h = [&](long x) { return horner(c, x); };
    const Rational mean = lattice::expect(table, h);
    for (Shift ell : {Shift::forward(), Shift::backward()}) {
      for (long x = table.lo(); x <= table.hi(); ++x) {
        const lattice::Fn<Rational> lh = [&](long y) {
          return table.in_range(y) ? lattice::pseudo_inverse(table, ell, h, mean, y) : Rational(0);
        };
        EXPECT_EQ(lattice::canonical(table, ell, lh, x), h(x) - mean) << trial << " x=" << x;
      }
    }
  }
}

TEST(Property, CovarianceRepresentationsAgreeExactly) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto table = exact_table(0, random_masses(rng, 3 + trial % 6));
    const auto ch = random_coefficients(rng, 2);
    const auto cg = random_coefficients(rng, 3);
    const lattice::Fn<Rational> h = [&](long x) { return horner(ch, x); };
    const lattice::Fn<Rational> g = [&](long x) { return horner(cg, x); };
    const Rational direct = lattice::covariance(table, h, g);
    for (Shift ell : {Shift::forward(), Shift::backward()}) {
      EXPECT_EQ(lattice::cov_via_inverse(table, ell, h, g), direct);
      EXPECT_EQ(lattice::cov_via_kernel(table, ell, h, g), direct);
    }
  }
}

TEST(Property, KlaassenSandwichOnRandomContinuousTargets) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> shape(0.6, 4.0);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < kTrials; ++trial) {
    const Distribution d = pick(rng) == 0 ? make_builtin(Gamma{shape(rng), shape(rng)})
                                          : make_builtin(Beta{shape(rng), shape(rng)});
    const auto f = poly({0, 1 + trial % 3, trial % 2, 1});
    const auto r = klaassen_bounds(d, Shift::differential(), f);
    EXPECT_TRUE(r.lower_holds) << d.label() << " " << r.lower << " > " << r.oracle_variance;
    EXPECT_TRUE(r.upper_holds) << d.label() << " " << r.upper << " < " << r.oracle_variance;
  }
}

TEST(Property, ExpansionParityOnRandomLattices) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> prob(0.1, 0.9);
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto d = make_builtin(Binomial{5 + trial, prob(rng)});
    const auto g = poly(random_coefficients(rng, 3));
    ShiftSequence ells;
    for (int i = 0; i < 3; ++i) ells.push_back(rng() % 2 ? Shift::forward() : Shift::backward());
    const auto r = variance_expansion(d, g, 3, ells);
    for (std::size_t i = 0; i < r.sandwich_holds.size(); ++i) {
      EXPECT_TRUE(r.sandwich_holds[i]) << d.label() << " n=" << i + 1 << " S=" << r.partial_sums[i] << " var=" << r.oracle_variance;
    }
    EXPECT_NEAR(r.partial_sums.back(), r.oracle_variance, 1e-8 * (1.0 + r.oracle_variance));
  }
}

TEST(Property, OlkinSheppOnRandomPolynomials) {
  std::mt19937_64 rng(505);
  const std::vector<Distribution> targets = {make_builtin(Normal{0.0, 1.0}), make_builtin(Poisson{2.5}),
                                             make_builtin(Hypergeometric{20, 8, 6})};
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto& d = targets[trial % targets.size()];
    const Shift ell = d.is_discrete() ? (trial % 2 ? Shift::forward() : Shift::backward()) : Shift::differential();
    const auto r = olkin_shepp(d, ell, poly(random_coefficients(rng, 3)), poly(random_coefficients(rng, 2)),
                               TestFunction::identity());
    EXPECT_TRUE(r.holds()) << d.label() << " trial " << trial;
  }
}

TEST(Property, KernelGramIsPsdOnRandomPoints) {
  std::mt19937_64 rng(606);
  const auto d = make_builtin(Laplace{0.0, 1.0});
  std::normal_distribution<double> pt(0.0, 2.0);
  for (int trial = 0; trial < kTrials; ++trial) {
    std::vector<double> xs(15);
    for (auto& x : xs) x = pt(rng);
    EXPECT_GE(min_eigenvalue(kernel_matrix(d, Shift::differential(), xs)), -1e-12);
  }
}
