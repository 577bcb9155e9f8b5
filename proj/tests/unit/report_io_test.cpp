#include "steinvar/report_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace steinvar;
using nlohmann::json;

namespace {

template <class T>
T round_trip(const T& v) {
  return json::parse(json(v).dump()).get<T>();
}

}  // namespace

TEST(Json, BoundReport) {
  const auto r = klaassen_bounds(make_builtin(Normal{}), Shift::differential(), TestFunction::power(3));
  const auto back = round_trip(r);
  EXPECT_EQ(back.lower, r.lower);
  EXPECT_EQ(back.upper, r.upper);
  EXPECT_EQ(back.oracle_variance, r.oracle_variance);
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.upper_holds, r.upper_holds);
  EXPECT_EQ(json(back), json(r));
}

TEST(Json, ExpansionReportWithMonteCarlo) {
  ExpansionOptions o;
  o.monte_carlo = MonteCarloConfig{1, 2000};
  const auto r = variance_expansion(make_builtin(Normal{}), TestFunction::sine(), 2, ShiftSequence(2, Shift::differential()), o);
  const auto back = round_trip(r);
  EXPECT_EQ(back.terms, r.terms);
  EXPECT_EQ(back.sandwich, r.sandwich);
  ASSERT_TRUE(back.mc_remainder.has_value());
  EXPECT_EQ(back.mc_remainder->value, r.mc_remainder->value);
}

TEST(Json, NonFiniteValuesSurvive) {
  BoundReport r;
  r.upper = INFINITY;
  r.lower = -INFINITY;
  r.oracle_variance = NAN;
  const auto j = json(r);
  EXPECT_EQ(j["upper"], "inf");
  const auto back = round_trip(r);
  EXPECT_TRUE(std::isinf(back.upper) && back.upper > 0);
  EXPECT_TRUE(std::isinf(back.lower) && back.lower < 0);
  EXPECT_TRUE(std::isnan(back.oracle_variance));
}

TEST(Json, MatrixAndFactorReports) {
  const auto d = make_builtin(Poisson{3.0});
  const auto m = olkin_shepp(d, Shift::forward(), TestFunction::identity(), TestFunction::power(2), TestFunction::identity());
  EXPECT_EQ(json(round_trip(m)), json(m));
  const auto grid = parse_grid("0:10:1");
  const auto f = factor_profile(d, Shift::forward(), grid);
  const auto fb = round_trip(f);
  EXPECT_EQ(fb.values, f.values);
  EXPECT_EQ(fb.argmax, f.argmax);
  const auto mills = mills_bounds_gaussian(1.0);
  EXPECT_EQ(round_trip(mills).R, mills.R);
}

TEST(Json, CheckResult) {
  CheckResult c{"3", "name", true, 1e-9, 1e-8, 0.5, 10.0, 12, "ok"};
  const auto b = round_trip(c);
  EXPECT_EQ(b.id, "3");
  EXPECT_EQ(b.cases, 12u);
  EXPECT_EQ(b.worst, 1e-9);
}

TEST(Csv, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(INFINITY), "inf");
  std::ostringstream out;
  write_csv(out, CsvTable{{"a", "b"}, {{1.0, 0.5}, {2.0, 1.0 / 3.0}}});
  EXPECT_EQ(out.str(), "a,b\n1,0.5\n2,0.33333333333333331\n");
}

TEST(Csv, ExpansionColumns) {
  const auto r = variance_expansion(make_builtin(Normal{}), TestFunction::power(2), 2, ShiftSequence(2, Shift::differential()));
  const auto t = to_csv(r);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"n", "term", "partial_sum", "variance", "is_lower", "holds"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.rows[0][1], 4.0, 1e-9);
}
