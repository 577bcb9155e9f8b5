#include "cli.hpp"
#include "steinvar/report_io.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

using nlohmann::json;
using steinvar::cli::main_entry;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "steinvar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, PoissonBoundsAreTight) {
  const auto r = call({"bounds", "--dist", "poisson:λ=3", "--f", "id", "--ell", "-1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["lower"].get<double>(), 3.0, 1e-12);
  EXPECT_NEAR(j["upper"].get<double>(), 3.0, 1e-12);
  EXPECT_NEAR(j["variance"].get<double>(), 3.0, 1e-12);
}

TEST(Cli, GaussianExpansion) {
  const auto r = call({"expand", "--dist", "normal:0,1", "--g", "x^4", "--n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const double want[] = {240.0, -216.0, 96.0, -24.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(j["terms"][i].get<double>(), want[i], 1e-8);
  EXPECT_NEAR(j["partial_sums"][3].get<double>(), 96.0, 1e-8);
}

TEST(Cli, FactorCsvColumn) {
  const auto r = call({"factors", "--dist", "normal:0,1", "--grid", "-4:4:0.1", "--output", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,R");
  double best = 0.0, at = 1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    if (v > best) best = v, at = x;
    ++rows;
  }
  EXPECT_EQ(rows, 81);
  EXPECT_NEAR(best, 0.6267, 5e-5);
  EXPECT_NEAR(at, 0.0, 1e-12);
}

TEST(Cli, KernelGrid) {
  const auto r = call({"kernel", "--dist", "binomial:4,0.5", "--ell", "+1", "--x", "2", "--output", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x,x_prime,K,K_over_p_x");
  const auto j = json::parse(call({"kernel", "--dist", "normal:0,1", "--grid", "-1,0,1"}).out);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_NEAR(j["rows"][1]["K_over_p_x"][1].get<double>(), 0.25 * std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(Cli, ValidationErrors) {
  EXPECT_EQ(call({"bounds", "--dist", "poisson:3", "--f", "id", "--ell", "0"}).code, 1);
  EXPECT_EQ(call({"bounds", "--dist", "nope:1", "--f", "id"}).code, 1);
  EXPECT_EQ(call({"bounds", "--dist", "normal:0,1", "--f", "tan"}).code, 1);
  EXPECT_EQ(call({"factors", "--dist", "beta:2,2", "--grid", "0:2:0.5"}).code, 1);
  EXPECT_EQ(call({"expand", "--dist", "normal:0,1", "--g", "x^2"}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  const auto r = call({"bounds", "--dist", "poisson:3", "--f", "id", "--ell", "0"});
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["kind"], "error");
  EXPECT_EQ(j["errors"][0]["code"], "UnsupportedSupport");
}

TEST(Cli, OutFileAndRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "steinvar_cli_bounds.json";
  const auto r = call({"bounds", "--dist", "normal:0,1", "--f", "x^3", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = json::parse(in);
  const auto report = j.get<steinvar::BoundReport>();
  EXPECT_NEAR(report.upper, 27.0, 1e-8);
  std::filesystem::remove(path);
}

TEST(Cli, Help) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("bounds"), std::string::npos);
}
