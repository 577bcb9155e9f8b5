#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace steinvar::cli {

enum class Output { Json, Csv };

struct RunSpec {
  std::string command;  // bounds | expand | kernel | factors | verify
  std::string dist;
  std::string f;        // bounds: the function whose variance is bounded
  std::string g;        // expand: the function being expanded
  std::string c;        // bounds: Klaassen weight, default L(id)
  std::string h;        // bounds: upper-bound standardizer, default id
  std::string ell;
  std::string ells;     // expand: comma list, defaults to ell repeated
  int n = 0;
  std::string x;        // kernel: reference points, defaults to the grid
  std::string grid;
  Output output = Output::Json;
  std::string out;
  std::uint64_t seed = 0;
  bool monte_carlo = false;
  bool serial = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitProperty = 2;

/// Runs one command and writes its report; returns the exit code.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// argv front end: parses flags into a RunSpec and calls run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace steinvar::cli
