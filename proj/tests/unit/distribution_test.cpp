#include "steinvar/distribution.hpp"
#include "steinvar/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace steinvar;

namespace {

std::vector<BuiltinFamily> families() {
  return {Normal{1.0, 2.0},       Beta{1.3, 2.4},   Beta{8.0 / 9.0, 1.0 / 3.0}, Gamma{1.3, 2.4},
          Gamma{1.0 / 3.0, 3.0},  Laplace{0.5, 2.0}, Binomial{20, 0.2},         Poisson{3.0},
          Poisson{15.0},          Hypergeometric{30, 10, 10}};
}

}  // namespace

TEST(Builtins, MassMeanAndVarianceByQuadrature) {
  for (const auto& fam : families()) {
    const auto d = make_builtin(fam);
    SCOPED_TRACE(d.label());
    const double mass = expect(d, [](double) { return 1.0; }).value;
    const double m1 = expect(d, [](double x) { return x; }).value;
    const double m2 = expect(d, [&](double x) { return (x - d.mean()) * (x - d.mean()); }).value;
    EXPECT_NEAR(mass, 1.0, 1e-10);
    EXPECT_NEAR(m1, d.mean(), 1e-9 * (1.0 + std::abs(d.mean())));
    EXPECT_NEAR(m2, d.variance(), 1e-9 * (1.0 + d.variance()));
    EXPECT_TRUE(validate(d).ok());
  }
}

TEST(Builtins, ClosedFormMoments) {
  EXPECT_DOUBLE_EQ(make_builtin(Gamma{1.3, 2.4}).mean(), 1.3 * 2.4);
  EXPECT_DOUBLE_EQ(make_builtin(Binomial{20, 0.2}).variance(), 20 * 0.2 * 0.8);
  EXPECT_DOUBLE_EQ(make_builtin(Laplace{0.0, 2.0}).variance(), 8.0);
  EXPECT_NEAR(make_builtin(Beta{2.0, 3.0}).variance(), 6.0 / (25.0 * 6.0), 1e-16);
}

TEST(Builtins, SingularBetaEndKeepsItsMass) {
  // p(x) ~ (1 − x)^{-2/3}: part of the mass sits within one ulp of 1.
  const auto d = make_builtin(Beta{8.0 / 9.0, 1.0 / 3.0});
  EXPECT_NEAR(expect(d, [](double) { return 1.0; }).value, 1.0, 1e-12);
  EXPECT_NEAR(partial_expect(d, [](double) { return 1.0; }, 0.999, 1.0).value, d.sf(0.999), 1e-12);
}

TEST(Builtins, CdfSfAndQuantile) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  EXPECT_NEAR(d.cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(d.cdf(1.3) + d.sf(1.3), 1.0, 1e-15);
  EXPECT_NEAR(d.quantile(d.cdf(0.7)), 0.7, 1e-9);
  const auto p = make_builtin(Poisson{3.0});
  EXPECT_NEAR(p.cdf(2.0), std::exp(-3.0) * (1.0 + 3.0 + 4.5), 1e-15);
  EXPECT_EQ(p.pdf(2.5), 0.0);
  EXPECT_EQ(p.pdf(-1.0), 0.0);
}

TEST(Builtins, SamplerMatchesMean) {
  for (const auto& fam : families()) {
    const auto d = make_builtin(fam);
    std::mt19937_64 rng(11);
    double s = 0.0;
    const int n = 200'000;
    for (int i = 0; i < n; ++i) s += d.sample(rng);
    EXPECT_NEAR(s / n, d.mean(), 6.0 * std::sqrt(d.variance() / n)) << d.label();
  }
}

TEST(Builtins, InvalidParametersAreRejected) {
  EXPECT_THROW(make_builtin(Normal{0.0, -1.0}), Error);
  EXPECT_THROW(make_builtin(Beta{0.0, 1.0}), Error);
  EXPECT_THROW(make_builtin(Binomial{10, 1.5}), Error);
  EXPECT_THROW(make_builtin(Poisson{0.0}), Error);
  EXPECT_THROW(make_builtin(Hypergeometric{10, 11, 3}), Error);
}

TEST(Exact, BinomialTableIsRational) {
  const auto d = make_builtin(Binomial{10, 0.2});
  ASSERT_TRUE(d.exact_lattice().has_value());
  Rational total = 0;
  for (long k = 0; k <= 10; ++k) total += d.exact_lattice()->pmf(k);
  EXPECT_EQ(total, Rational(1));
  EXPECT_EQ(d.exact_lattice()->pmf(0), Rational(Integer(1) << 20, Integer(9765625)));
  EXPECT_EQ(binomial_coefficient(20, 10), Integer(184756));
}

TEST(Parse, InlineForms) {
  EXPECT_EQ(parse_distribution("poisson:λ=3").mean(), 3.0);
  EXPECT_EQ(parse_distribution("poisson:lambda=3").mean(), 3.0);
  EXPECT_EQ(parse_distribution("normal:1,2").variance(), 2.0);
  EXPECT_EQ(parse_distribution("binomial:20,0.2").mean(), 4.0);
  EXPECT_THROW(parse_distribution("cauchy:0,1"), Error);
  EXPECT_THROW(parse_distribution(""), Error);
  EXPECT_THROW(parse_distribution("beta:2"), Error);
  EXPECT_THROW(parse_distribution("binomial:2.5,0.5"), Error);
  EXPECT_EQ(parse_distribution("normal:3").variance(), 1.0);
}

TEST(Parse, JsonAndFile) {
  const auto d = parse_distribution(R"({"family": "gamma", "params": {"shape": 2, "scale": 0.5}})");
  EXPECT_DOUBLE_EQ(d.mean(), 1.0);
  const auto path = std::filesystem::temp_directory_path() / "steinvar_dist_test.json";
  {
    std::ofstream out(path);
    out << R"({"custom": {"support": [0, 2], "measure": "lebesgue", "density_table": [[0, 0], [1, 1], [2, 0]]}})";
  }
  const auto tri = parse_distribution(path.string());
  EXPECT_NEAR(tri.mean(), 1.0, 1e-10);
  EXPECT_NEAR(tri.variance(), 1.0 / 6.0, 1e-10);
  std::filesystem::remove(path);
  const auto round = distribution_from_json(family_to_json(Beta{1.3, 2.4}));
  EXPECT_EQ(round.mean(), make_builtin(Beta{1.3, 2.4}).mean());
}

TEST(Custom, DensityIsNormalizedOrRejected) {
  const SupportSpec unit{0.0, 1.0, MeasureKind::Lebesgue};
  const auto d = make_custom(unit, [](double x) { return 2.0 * x; });
  EXPECT_NEAR(d.mean(), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.cdf(0.5), 0.25, 1e-12);
  try {
    make_custom(unit, [](double x) { return x; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
  }
}

TEST(Custom, LatticeFromMasses) {
  const auto d = make_lattice(-1, {0.25, 0.5, 0.25});
  EXPECT_NEAR(d.mean(), 0.0, 1e-16);
  EXPECT_NEAR(d.variance(), 0.5, 1e-16);
  EXPECT_TRUE(d.is_discrete());
  EXPECT_EQ(d.pdf(2.0), 0.0);
}

TEST(Support, MembershipFollowsDensity) {
  const auto g = make_builtin(Gamma{0.5, 1.0});  // infinite at 0
  EXPECT_FALSE(g.in_support(0.0));
  EXPECT_TRUE(g.in_support(1e-300));
  const auto b = make_builtin(Beta{2.0, 2.0});  // zero at both ends
  EXPECT_TRUE(b.in_support(0.5));
  EXPECT_FALSE(b.in_support(1.5));
  const auto p = make_builtin(Poisson{3.0});
  EXPECT_TRUE(p.in_support(500.0));
  EXPECT_FALSE(p.in_support(2.5));
}
