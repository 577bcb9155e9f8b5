#pragma once

#include "steinvar/errors.hpp"
#include "steinvar/support.hpp"

#include <string>
#include <vector>

namespace steinvar {

/// The shift ℓ ∈ {−1, 0, +1} selecting backward differences, derivatives or
/// forward differences. ℓ = 0 pairs with Lebesgue targets, ℓ = ±1 with lattices.
class Shift {
 public:
  constexpr explicit Shift(int ell) : ell_(ell) {
    if (ell < -1 || ell > 1) throw Error(ErrorCode::InvalidParameter, "shift must be -1, 0 or +1");
  }

  static constexpr Shift backward() { return Shift(-1); }
  static constexpr Shift differential() { return Shift(0); }
  static constexpr Shift forward() { return Shift(1); }

  constexpr int value() const { return ell_; }
  constexpr Shift opposite() const { return Shift(-ell_); }
  constexpr Shift squared() const { return Shift(ell_ * ell_); }
  /// ℓ(ℓ+1)/2: the offset in χ^ℓ(x, y) = 𝕀[x ≤ y − offset].
  constexpr int chi_offset() const { return ell_ * (ell_ + 1) / 2; }

  friend constexpr bool operator==(Shift a, Shift b) { return a.ell_ == b.ell_; }

 private:
  int ell_;
};

using ShiftSequence = std::vector<Shift>;

/// χ^ℓ(x, y) = 𝕀[x ≤ y − ℓ(ℓ+1)/2].
constexpr int chi(Shift ell, double x, double y) { return x <= y - ell.chi_offset() ? 1 : 0; }

/// Throws UnsupportedSupport when ℓ does not match the measure.
void require_compatible(Shift ell, MeasureKind measure);

/// Parses "+1", "1", "-1", "0", "+", "-".
Shift parse_shift(const std::string& text);
/// Parses a comma separated list, e.g. "+1,-1" or "+-".
ShiftSequence parse_shift_sequence(const std::string& text);
std::string to_string(Shift ell);

}  // namespace steinvar
