#include "steinvar/errors.hpp"
#include "steinvar/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace steinvar;

TEST(Integrate, GaussianOverTheLine) {
  const auto e = integrate([](double x) { return std::exp(-0.5 * x * x); }, -kInf, kInf);
  EXPECT_NEAR(e.value, std::sqrt(2.0 * std::numbers::pi), 1e-12);
}

TEST(Integrate, HalfLineWithEndpointSingularity) {
  // Γ(1/2) = √π
  const auto e = integrate([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0, kInf);
  EXPECT_NEAR(e.value, std::sqrt(std::numbers::pi), 1e-10);
}

TEST(Integrate, OscillatingHalfLine) {
  // ∫_0^∞ x^{0.3} e^{-x/2.4} sin x dx, slow decay plus an endpoint kink.
  const auto e = integrate([](double x) { return std::pow(x, 0.3) * std::exp(-x / 2.4) * std::sin(x); }, 0.0, kInf);
  const double a = 0.3, b = 1.0 / 2.4;
  const double want = std::tgamma(a + 1.0) * std::sin((a + 1.0) * std::atan(1.0 / b)) / std::pow(1.0 + b * b, (a + 1.0) / 2.0);
  EXPECT_NEAR(e.value, want, 1e-9);
}

TEST(Integrate, BreakpointsSplitJumps) {
  const double cut[] = {0.3};
  const auto e = integrate([](double x) { return x <= 0.3 ? 1.0 : 0.0; }, 0.0, 1.0, {}, cut);
  EXPECT_NEAR(e.value, 0.3, 1e-14);
}

TEST(Integrate, DivergenceIsReported) {
  try {
    integrate([](double x) { return 1.0 / x; }, 0.0, 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::NotIntegrable || e.code() == ErrorCode::NoConvergence);
  }
}

TEST(SumLattice, GeometricTail) {
  const auto e = sum_lattice([](double k) { return std::pow(0.5, k); }, 0.0, kInf);
  EXPECT_NEAR(e.value, 2.0, 1e-14);
}

TEST(SumLattice, FiniteRangeIsExact) {
  const auto e = sum_lattice([](double k) { return k; }, 1.0, 100.0);
  EXPECT_EQ(e.value, 5050.0);
}

TEST(Integrate2, TriangleRegion) {
  Region2 r;
  r.outer = {0.0, 1.0, MeasureKind::Lebesgue};
  r.inner = [](double x) { return Limits{0.0, x}; };
  const auto e = integrate2([](double, double) { return 1.0; }, r);
  EXPECT_NEAR(e.value, 0.5, 1e-13);
}

TEST(CompensatedSum, RecoversCancelledBits) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}

TEST(Splitmix, DeterministicAndMixing) {
  EXPECT_EQ(splitmix64(42), splitmix64(42));
  EXPECT_NE(splitmix64(42), splitmix64(43));
}

TEST(ComparisonTolerance, HasAFloor) {
  EXPECT_EQ(comparison_tolerance(0.0), 1e-10);
  EXPECT_DOUBLE_EQ(comparison_tolerance(1e-6), 1e-5);
}

TEST(MonteCarlo, MeanOfUniformIsReproducible) {
  const Sampler u = [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
  const MonteCarloConfig cfg{7, 200'000};
  const auto a = mc_expect([](std::span<const double> x) { return x[0] * x[1]; }, u, 2, cfg);
  const auto b = mc_expect([](std::span<const double> x) { return x[0] * x[1]; }, u, 2, cfg);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NEAR(a.value, 0.25, 5.0 * a.std_error);
  EXPECT_GT(a.std_error, 0.0);
}

TEST(Eigen, MinEigenvalueOfSymmetricPart) {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  EXPECT_NEAR(min_eigenvalue(m), 1.0, 1e-14);
  m << 0.0, 2.0, 0.0, 0.0;  // symmetric part has eigenvalues ±1
  EXPECT_NEAR(min_eigenvalue(m), -1.0, 1e-14);
}
