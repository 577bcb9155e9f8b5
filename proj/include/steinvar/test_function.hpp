#pragma once

#include "steinvar/numerics.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace steinvar {

/// A real function together with whatever is known about its derivatives.
/// Derivatives are produced lazily: analytic when the factory knows them,
/// otherwise by central differences (unless differencing is forbidden).
class TestFunction {
 public:
  using Deriver = std::function<TestFunction()>;

  TestFunction(std::string label, RealFn value, Deriver derivative = {});
  /// f, f', f'', ... given explicitly; differencing takes over past the list.
  TestFunction(std::string label, std::vector<RealFn> chain);

  double operator()(double x) const { return s_->value(x); }
  const RealFn& fn() const { return s_->value; }
  const std::string& label() const { return s_->label; }
  std::span<const double> breakpoints() const { return s_->breakpoints; }
  bool has_analytic_derivative() const { return static_cast<bool>(s_->derive); }
  bool differencing_allowed() const { return s_->allow_differencing; }

  /// Throws MissingDerivative when no derivative is known and differencing is off.
  TestFunction derivative() const;

  TestFunction with_breakpoints(std::vector<double> points) const;
  TestFunction without_differencing() const;
  TestFunction relabel(std::string label) const;

  static TestFunction identity();
  static TestFunction constant(double c);
  /// c0 + c1 x + c2 x² + ...
  static TestFunction polynomial(std::vector<double> coefficients);
  static TestFunction power(int k);
  /// amplitude · e^{rate·x}
  static TestFunction exponential(double rate, double amplitude = 1.0);
  /// amplitude · sin(x + phase)
  static TestFunction sine(double phase = 0.0, double amplitude = 1.0);
  /// 𝕀[x ≤ m]; no derivative.
  static TestFunction indicator_le(double m);
  /// Logistic ramp 1/(1 + e^{(x−m)/width}), a smooth stand-in for 𝕀[x ≤ m].
  static TestFunction smoothed_indicator(double m, double width);
  /// min(x, c)
  static TestFunction min_with(double c);
  /// Cubic Hermite interpolation through (x, f(x), f'(x)) rows; constant beyond the ends.
  static TestFunction table(std::vector<std::array<double, 3>> rows);

  /// Central difference step used when no derivative is known.
  static double difference_step(double x);

 private:
  struct State {
    std::string label;
    RealFn value;
    Deriver derive;
    std::vector<double> breakpoints;
    bool allow_differencing = true;
  };
  explicit TestFunction(std::shared_ptr<const State> s) : s_(std::move(s)) {}
  std::shared_ptr<const State> s_;
};

TestFunction operator+(const TestFunction& f, const TestFunction& g);
TestFunction operator-(const TestFunction& f, const TestFunction& g);
TestFunction operator*(double a, const TestFunction& f);
/// f + c
TestFunction operator+(const TestFunction& f, double c);

/// Parses the CLI vocabulary: id, x^k, exp(-x), exp(x), sin, cos, indicator(<=m),
/// smooth_indicator(m,w), min(x,c), const(c), poly(c0,c1,...), table:<csv of x,f,df>.
TestFunction parse_test_function(const std::string& text);

}  // namespace steinvar
