#include "steinvar/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  steinvar::VerifyOptions options;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    if (arg == "--serial") options.exec = steinvar::Execution::Serial;
  }
  int failed = 0;
  for (int c = 1; c <= steinvar::kAcceptanceCount; ++c) {
    if (only != 0 && c != only) continue;
    const auto r = steinvar::run_acceptance(c, options);
    std::printf("%s\n", steinvar::format_check(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
