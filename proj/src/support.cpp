#include "steinvar/support.hpp"

#include "steinvar/errors.hpp"
#include "steinvar/shift.hpp"

#include <sstream>

namespace steinvar {

SupportSpec make_support(double lower, double upper, MeasureKind measure) {
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    fail(ErrorCode::InvalidParameter, "support requires lower < upper");
  }
  if (measure == MeasureKind::Counting) {
    auto integral = [](double v) { return std::isinf(v) || v == std::floor(v); };
    if (!integral(lower) || !integral(upper)) {
      fail(ErrorCode::InvalidParameter, "counting support ends must be integers or infinite");
    }
  }
  return SupportSpec{lower, upper, measure};
}

void require_compatible(Shift ell, MeasureKind measure) {
  const bool lebesgue = measure == MeasureKind::Lebesgue;
  if (lebesgue != (ell.value() == 0)) {
    fail(ErrorCode::UnsupportedSupport,
         lebesgue ? "Lebesgue targets admit only ell = 0" : "counting targets admit only ell = -1 or +1");
  }
}

Shift parse_shift(const std::string& text) {
  if (text == "+" || text == "+1" || text == "1") return Shift::forward();
  if (text == "-" || text == "-1") return Shift::backward();
  if (text == "0") return Shift::differential();
  fail(ErrorCode::ValidationError, "cannot parse shift '" + text + "'");
}

ShiftSequence parse_shift_sequence(const std::string& text) {
  ShiftSequence out;
  if (text.find(',') == std::string::npos && !text.empty() &&
      text.find_first_not_of("+-") == std::string::npos) {
    for (char c : text) out.push_back(c == '+' ? Shift::forward() : Shift::backward());
    return out;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_shift(item));
  if (out.empty()) fail(ErrorCode::ValidationError, "empty shift sequence");
  return out;
}

std::string to_string(Shift ell) {
  switch (ell.value()) {
    case -1: return "-1";
    case 1: return "+1";
    default: return "0";
  }
}

}  // namespace steinvar
