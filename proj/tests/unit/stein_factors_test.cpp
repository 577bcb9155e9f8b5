#include "steinvar/errors.hpp"
#include "steinvar/stein_factors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace steinvar;

TEST(FactorR, GaussianValueAtZero) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  EXPECT_NEAR(factor_R(d, Shift::differential(), 0.0), 0.25 * std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(FactorR, LatticeShiftsUseTheRightTails) {
  const auto d = make_builtin(Poisson{15.0});
  const double p = d.pdf(15.0);
  EXPECT_NEAR(factor_R(d, Shift::forward(), 15.0), d.cdf(14.0) * d.sf(14.0) / p, 1e-15);
  EXPECT_NEAR(factor_R(d, Shift::backward(), 15.0), d.cdf(15.0) * d.sf(15.0) / p, 1e-15);
}

TEST(FactorR, OffSupportIsAnError) {
  const auto d = make_builtin(Beta{2.0, 2.0});
  try {
    factor_R(d, Shift::differential(), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDensity);
  }
}

TEST(Profile, GaussianMaximumAtTheCentre) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  const auto grid = parse_grid("-4:4:0.1");
  const auto prof = factor_profile(d, Shift::differential(), grid);
  EXPECT_EQ(prof.grid.size(), grid.size());
  EXPECT_NEAR(prof.argmax, 0.0, 1e-12);
  EXPECT_NEAR(prof.sup_on_grid, 0.6266570686577501, 1e-13);
}

TEST(Mills, ChainHolds) {
  for (double x = 0.0; x <= 10.0; x += 0.25) EXPECT_TRUE(mills_bounds_gaussian(x).chain_holds()) << x;
  EXPECT_THROW(mills_bounds_gaussian(-1.0), Error);
}

TEST(InverseBound, BoundedFunctions) {
  const auto d = make_builtin(Gamma{1.3, 2.4});
  const auto h = TestFunction::smoothed_indicator(2.0, 0.5);
  for (double x : {0.2, 1.0, 4.0, 9.0}) EXPECT_TRUE(inverse_bound_check(d, Shift::differential(), h, x).holds) << x;
}

TEST(SupNorm, IncludesSupportEnds) {
  const auto d = make_builtin(Beta{2.0, 1.0});  // p(1) = 2
  EXPECT_EQ(sup_norm(d, TestFunction::identity()), 1.0);
}

TEST(Lipschitz, SolutionBoundedByConstant) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  const auto r = lipschitz_solution_bound(d, Shift::differential(), TestFunction::sine(), TestFunction::identity(), 1.0, 0.3);
  EXPECT_TRUE(r.bound_ok);
  EXPECT_THROW(lipschitz_solution_bound(d, Shift::differential(), TestFunction::power(2), TestFunction::identity(), 1.0, 0.3),
               Error);
  EXPECT_THROW(lipschitz_solution_bound(d, Shift::differential(), TestFunction::sine(), TestFunction::power(2), 1.0, 0.3),
               Error);
}

TEST(SignCheck, MonotoneHasConstantSign) {
  const auto d = make_builtin(Binomial{20, 0.2});
  const auto s = sign_constancy_check(d, Shift::forward(), TestFunction::power(3));
  EXPECT_TRUE(s.constant);
  EXPECT_EQ(s.sign, -1);
  EXPECT_THROW(sign_constancy_check(make_builtin(Normal{}), Shift::differential(), TestFunction::sine()), Error);
}
