#pragma once

#include <cmath>
#include <limits>

namespace steinvar {

enum class MeasureKind { Lebesgue, Counting };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closure [lower, upper] of the support together with the reference measure.
/// For counting measure both ends are integers or infinite.
struct SupportSpec {
  double lower = -kInf;
  double upper = kInf;
  MeasureKind measure = MeasureKind::Lebesgue;

  bool is_discrete() const { return measure == MeasureKind::Counting; }
  bool is_bounded() const { return std::isfinite(lower) && std::isfinite(upper); }

  /// Membership in the closed interval (and the lattice, for counting measure).
  bool contains(double x) const {
    if (!(x >= lower && x <= upper)) return false;
    return measure == MeasureKind::Lebesgue || x == std::floor(x);
  }
};

/// Throws InvalidParameter unless a < b and counting ends are integral.
SupportSpec make_support(double lower, double upper, MeasureKind measure);

}  // namespace steinvar
