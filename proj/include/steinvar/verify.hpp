#pragma once

#include "steinvar/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace steinvar {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  double worst = 0.0;      // the quantity compared against `threshold`
  double threshold = 0.0;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 when unlimited
  std::size_t cases = 0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  Execution exec = Execution::Parallel;
};

inline constexpr int kAcceptanceCount = 10;

/// Acceptance criterion 1..10.
CheckResult run_acceptance(int criterion, const VerifyOptions& options = {});
std::vector<CheckResult> acceptance_suite(const VerifyOptions& options = {});

/// Properties beyond the acceptance list: normalization, operator inversion,
/// kernel positivity, Lagrange identity, sandwich parity, Monte Carlo remainder,
/// report round-trips and serial/parallel agreement.
std::vector<CheckResult> invariant_suite(const VerifyOptions& options = {});

std::string format_check(const CheckResult& r);

}  // namespace steinvar
