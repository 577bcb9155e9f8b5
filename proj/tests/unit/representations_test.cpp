#include "steinvar/representations.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace steinvar;

TEST(Kernel, SymmetricAndClosedFormForGaussian) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  for (double x : {-1.0, 0.0, 0.7}) {
    for (double y : {-0.4, 0.2, 2.0}) {
      EXPECT_DOUBLE_EQ(kernel_K(d, Shift::differential(), x, y), kernel_K(d, Shift::differential(), y, x));
      EXPECT_NEAR(kernel_K(d, Shift::differential(), x, y), d.cdf(std::min(x, y)) * d.sf(std::max(x, y)), 1e-16);
    }
  }
}

TEST(Kernel, ForwardShiftOffsetsByOne) {
  const auto d = make_builtin(Poisson{3.0});
  EXPECT_NEAR(kernel_K(d, Shift::forward(), 2.0, 4.0), d.cdf(1.0) * d.sf(3.0), 1e-16);
  EXPECT_NEAR(kernel_K(d, Shift::backward(), 2.0, 4.0), d.cdf(2.0) * d.sf(4.0), 1e-16);
}

TEST(Representations, ThreeFormsOfTheInverseAgree) {
  const auto d = make_builtin(Beta{1.3, 2.4});
  const auto h = TestFunction::power(2);
  const auto lh = pseudo_inverse(d, Shift::differential(), h);
  for (double x : {0.1, 0.4, 0.8}) {
    EXPECT_NEAR(-lh(x), inverse_via_kernel(d, Shift::differential(), h, x), 1e-8);
    EXPECT_NEAR(-lh(x), inverse_via_double(d, Shift::differential(), h, x), 1e-8);
  }
}

TEST(Representations, CovarianceTripleOnALattice) {
  const auto d = make_builtin(Hypergeometric{30, 10, 10});
  const auto h = TestFunction::power(2);
  const auto g = TestFunction::exponential(-0.5);
  const double direct = cov_direct(d, h, g);
  for (Shift ell : {Shift::forward(), Shift::backward()}) {
    EXPECT_NEAR(cov_via_inverse(d, ell, h, g), direct, 1e-10);
    EXPECT_NEAR(cov_via_kernel(d, ell, h, g), direct, 1e-10);
  }
}

TEST(Representations, VariancePairIdentity) {
  const auto d = make_builtin(Laplace{0.0, 1.0});
  const auto g = TestFunction::sine();
  EXPECT_NEAR(variance_pair_identity(d, g), cov_direct(d, g, g), 1e-8);
}

TEST(Lagrange, IdentityHolds) {
  const auto d = make_builtin(Gamma{2.0, 1.0});
  const auto r = lagrange_residual(d, Shift::differential(), TestFunction::identity(), TestFunction::sine(), 0.5, 3.0);
  EXPECT_NEAR(r.identity_error(), 0.0, 1e-8);
  EXPECT_GE(r.remainder, -1e-12);
}

TEST(NaturalGradient, PoissonAndBinomial) {
  for (const auto& fam : {BuiltinFamily{Poisson{3.0}}, BuiltinFamily{Binomial{10, 0.5}}}) {
    const auto d = make_builtin(fam);
    const auto r = natural_gradient_identity(d, TestFunction::power(3));
    EXPECT_NEAR(r.cov, r.rhs, 1e-9 * std::abs(r.cov));
  }
  EXPECT_THROW(natural_gradient_identity(make_builtin(Normal{}), TestFunction::identity()), Error);
}

TEST(Phi, WindowAndWeights) {
  const auto d = make_builtin(Binomial{6, 0.5});
  const auto w = phi_window(d, Shift::forward(), 1.0, 4.0);
  EXPECT_EQ(w.lo, 2.0);
  EXPECT_EQ(w.hi, 4.0);
  EXPECT_EQ(phi3(d, Shift::forward(), 1.0, 1.0, 4.0), 0.0);
  EXPECT_NEAR(phi3(d, Shift::forward(), 1.0, 2.0, 4.0), 1.0 / d.pdf(2.0), 1e-12);
}
