#include "steinvar/errors.hpp"
#include "steinvar/stein_ops.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace steinvar;

TEST(Canonical, GaussianScore) {
  const auto d = make_builtin(Normal{1.0, 2.0});
  const auto t = canonical_op(d, Shift::differential(), TestFunction::constant(1.0));
  for (double x : {-2.0, 0.0, 1.0, 3.5}) EXPECT_NEAR(t(x), -(x - 1.0) / 2.0, 1e-14);
}

TEST(Canonical, PoissonForwardDifference) {
  const auto d = make_builtin(Poisson{3.0});
  const auto f = TestFunction::identity();
  const auto t = canonical_op(d, Shift::forward(), f);
  // (f(x+1) p(x+1) − f(x) p(x)) / p(x) = (x+1)·λ/(x+1) − x
  for (double x : {0.0, 1.0, 4.0, 9.0}) EXPECT_NEAR(t(x), 3.0 - x, 1e-12);
}

TEST(Canonical, MeanZeroOnTheClass) {
  for (const auto& [fam, ell] : {std::pair<BuiltinFamily, Shift>{Gamma{2.0, 1.0}, Shift::differential()},
                                 {Binomial{12, 0.3}, Shift::forward()},
                                 {Binomial{12, 0.3}, Shift::backward()}}) {
    const auto d = make_builtin(fam);
    // Backward differences need f p to vanish at the top of the lattice.
    const auto f = ell.value() == -1 ? TestFunction::polynomial({-12.0, 1.0}) : TestFunction::identity();
    const auto c = check_canonical_class(d, ell, f);
    EXPECT_TRUE(c.member) << d.label();
    EXPECT_NEAR(c.mean_of_operator, 0.0, 1e-10);
  }
  const auto outside = check_canonical_class(make_builtin(Binomial{12, 0.3}), Shift::backward(), TestFunction::identity());
  EXPECT_FALSE(outside.member);
}

TEST(PseudoInverse, ClosedForms) {
  const auto n = make_builtin(Normal{0.0, 3.0});
  const auto ln = pseudo_inverse(n, Shift::differential(), TestFunction::identity());
  for (double x : {-4.0, -1.0, 0.0, 2.0, 6.0}) EXPECT_NEAR(ln(x), -3.0, 1e-9);

  const auto p = make_builtin(Poisson{3.0});
  const auto plus = pseudo_inverse(p, Shift::forward(), TestFunction::identity());
  const auto minus = pseudo_inverse(p, Shift::backward(), TestFunction::identity());
  for (double x : {0.0, 2.0, 7.0, 30.0}) {
    EXPECT_NEAR(plus(x), -x, 1e-9 * (1.0 + x));
    EXPECT_NEAR(minus(x), -3.0, 1e-9);
  }
}

TEST(PseudoInverse, InvertsTheCanonicalOperator) {
  const auto d = make_builtin(Gamma{1.3, 2.4});
  const auto h = TestFunction::sine();
  const auto lh = pseudo_inverse(d, Shift::differential(), h);
  const auto t = canonical_op(d, Shift::differential(), lh.as_test_function());
  const double eh = mean_of(d, h);
  for (double x : {0.5, 1.0, 3.0, 8.0}) EXPECT_NEAR(t(x), h(x) - eh, 1e-5);
}

TEST(PseudoInverse, LatticeInversionIsExactish) {
  const auto d = make_builtin(Binomial{15, 0.35});
  const auto h = TestFunction::power(2);
  for (Shift ell : {Shift::forward(), Shift::backward()}) {
    const auto lh = pseudo_inverse(d, ell, h);
    const auto t = canonical_op(d, ell, lh.as_test_function());
    const double eh = mean_of(d, h);
    for (double x = 0; x <= 15; x += 1.0) EXPECT_NEAR(t(x), h(x) - eh, 1e-9) << x;
  }
}

TEST(SteinKernel, GaussianIsVariance) {
  const auto d = make_builtin(Normal{2.0, 0.5});
  const auto tau = stein_kernel(d, Shift::differential());
  for (double x : {0.0, 2.0, 3.0}) EXPECT_NEAR(tau(x), 0.5, 1e-9);
}

TEST(Standardized, SolutionSolvesTheEquation) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  const auto h = TestFunction::exponential(0.5);
  const auto eta = TestFunction::identity();
  const auto g = solve_stein_equation(d, Shift::differential(), h, eta);
  const auto a = standardized_op(d, Shift::differential(), eta, g.as_test_function());
  const double eh = mean_of(d, h);
  for (double x : {-2.0, 0.0, 1.5}) EXPECT_NEAR(a(x), h(x) - eh, 1e-5);
}

TEST(Shifts, IncompatibleMeasureIsRejected) {
  const auto n = make_builtin(Normal{});
  const auto p = make_builtin(Poisson{2.0});
  try {
    canonical_op(n, Shift::forward(), TestFunction::identity());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedSupport);
  }
  EXPECT_THROW(pseudo_inverse(p, Shift::differential(), TestFunction::identity()), Error);
  EXPECT_THROW(Shift(2), Error);
  EXPECT_EQ(parse_shift("-1"), Shift::backward());
  EXPECT_EQ(parse_shift("+"), Shift::forward());
  EXPECT_EQ(parse_shift_sequence("+1,-1,0").size(), 3u);
}

TEST(TestFunctions, VocabularyAndDerivatives) {
  EXPECT_EQ(parse_test_function("x^3")(2.0), 8.0);
  EXPECT_NEAR(parse_test_function("exp(-x)")(1.0), std::exp(-1.0), 1e-16);
  EXPECT_EQ(parse_test_function("indicator(<=2)")(2.0), 1.0);
  EXPECT_EQ(parse_test_function("indicator(<=2)")(2.5), 0.0);
  EXPECT_EQ(parse_test_function("poly(1,2,3)")(2.0), 17.0);
  EXPECT_EQ(parse_test_function("min(x,1)")(3.0), 1.0);
  EXPECT_THROW(parse_test_function("tan"), Error);
  EXPECT_NEAR(TestFunction::power(4).derivative().derivative()(2.0), 48.0, 1e-12);
  EXPECT_NEAR(TestFunction::sine().derivative()(0.3), std::cos(0.3), 1e-15);
  EXPECT_THROW(TestFunction::indicator_le(0.0).without_differencing().derivative(), Error);
  const auto t = TestFunction::table({{{0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}}});
  EXPECT_NEAR(t(0.25), 0.25, 1e-15);
}
