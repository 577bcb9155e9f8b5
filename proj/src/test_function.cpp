#include "steinvar/test_function.hpp"

#include "steinvar/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

namespace steinvar {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

TestFunction::TestFunction(std::string label, RealFn value, Deriver derivative) {
  if (!value) fail(ErrorCode::InvalidParameter, "test function needs a value");
  auto s = std::make_shared<State>();
  s->label = std::move(label);
  s->value = std::move(value);
  s->derive = std::move(derivative);
  s_ = std::move(s);
}

TestFunction::TestFunction(std::string label, std::vector<RealFn> chain) {
  if (chain.empty() || !chain.front()) fail(ErrorCode::InvalidParameter, "test function needs a value");
  auto s = std::make_shared<State>();
  s->label = label;
  s->value = chain.front();
  if (chain.size() > 1) {
    std::vector<RealFn> rest(chain.begin() + 1, chain.end());
    s->derive = [label, rest] { return TestFunction("d(" + label + ")", rest); };
  }
  s_ = std::move(s);
}

double TestFunction::difference_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

TestFunction TestFunction::derivative() const {
  if (s_->derive) {
    TestFunction d = s_->derive();
    if (!s_->allow_differencing) d = d.without_differencing();
    return d;
  }
  if (!s_->allow_differencing) {
    fail(ErrorCode::MissingDerivative, "no derivative known for '" + s_->label + "' and differencing is disabled");
  }
  RealFn f = s_->value;
  auto state = std::make_shared<State>();
  state->label = "d(" + s_->label + ")";
  state->value = [f](double x) {
    const double h = difference_step(x);
    return (f(x + h) - f(x - h)) / (2.0 * h);
  };
  state->breakpoints = s_->breakpoints;
  return TestFunction(std::shared_ptr<const State>(std::move(state)));
}

TestFunction TestFunction::with_breakpoints(std::vector<double> points) const {
  auto s = std::make_shared<State>(*s_);
  s->breakpoints = std::move(points);
  return TestFunction(std::shared_ptr<const State>(std::move(s)));
}

TestFunction TestFunction::without_differencing() const {
  auto s = std::make_shared<State>(*s_);
  s->allow_differencing = false;
  return TestFunction(std::shared_ptr<const State>(std::move(s)));
}

TestFunction TestFunction::relabel(std::string label) const {
  auto s = std::make_shared<State>(*s_);
  s->label = std::move(label);
  return TestFunction(std::shared_ptr<const State>(std::move(s)));
}

TestFunction TestFunction::identity() { return polynomial({0.0, 1.0}).relabel("id"); }

TestFunction TestFunction::constant(double c) { return polynomial({c}).relabel("const(" + num(c) + ")"); }

TestFunction TestFunction::polynomial(std::vector<double> coefficients) {
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.empty()) coefficients.push_back(0.0);
  std::string label = "poly(";
  for (std::size_t i = 0; i < coefficients.size(); ++i) label += (i ? "," : "") + num(coefficients[i]);
  label += ")";
  auto value = [coefficients](double x) {
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) acc = acc * x + coefficients[i];
    return acc;
  };
  auto derive = [coefficients] {
    std::vector<double> d;
    for (std::size_t i = 1; i < coefficients.size(); ++i) d.push_back(coefficients[i] * static_cast<double>(i));
    return polynomial(d);
  };
  return TestFunction(label, value, derive);
}

TestFunction TestFunction::power(int k) {
  if (k < 0) fail(ErrorCode::InvalidParameter, "power must be nonnegative");
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  c.back() = 1.0;
  return polynomial(c).relabel(k == 1 ? "id" : "x^" + std::to_string(k));
}

TestFunction TestFunction::exponential(double rate, double amplitude) {
  std::string label = amplitude == 1.0 ? "" : num(amplitude) + "*";
  label += rate == 1.0 ? "exp(x)" : (rate == -1.0 ? "exp(-x)" : "exp(" + num(rate) + "x)");
  return TestFunction(
      label, [rate, amplitude](double x) { return amplitude * std::exp(rate * x); },
      [rate, amplitude] { return exponential(rate, amplitude * rate); });
}

TestFunction TestFunction::sine(double phase, double amplitude) {
  std::string label = phase == 0.0 && amplitude == 1.0 ? "sin" : num(amplitude) + "*sin(x+" + num(phase) + ")";
  return TestFunction(
      label, [phase, amplitude](double x) { return amplitude * std::sin(x + phase); },
      [phase, amplitude] { return sine(phase + std::numbers::pi / 2.0, amplitude); });
}

TestFunction TestFunction::indicator_le(double m) {
  return TestFunction("indicator(<=" + num(m) + ")", [m](double x) { return x <= m ? 1.0 : 0.0; })
      .with_breakpoints({m})
      .without_differencing();
}

TestFunction TestFunction::smoothed_indicator(double m, double width) {
  if (!(width > 0.0)) fail(ErrorCode::InvalidParameter, "smoothing width must be positive");
  auto sigma = [m, width](double x) {
    const double z = (x - m) / width;
    return z > 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
  };
  auto first = [sigma, width](double x) {
    const double s = sigma(x);
    return -s * (1.0 - s) / width;
  };
  auto second = [sigma, width](double x) {
    const double s = sigma(x);
    return s * (1.0 - s) * (1.0 - 2.0 * s) / (width * width);
  };
  return TestFunction("smooth_indicator(" + num(m) + "," + num(width) + ")", std::vector<RealFn>{sigma, first, second});
}

TestFunction TestFunction::min_with(double c) {
  auto step = TestFunction("step(" + num(c) + ")", [c](double x) { return x < c ? 1.0 : 0.0; })
                  .with_breakpoints({c})
                  .without_differencing();
  return TestFunction("min(x," + num(c) + ")", [c](double x) { return std::min(x, c); }, [step] { return step; })
      .with_breakpoints({c});
}

TestFunction TestFunction::table(std::vector<std::array<double, 3>> rows) {
  if (rows.size() < 2) fail(ErrorCode::InvalidParameter, "function table needs at least two rows");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i][0] > rows[i - 1][0])) fail(ErrorCode::InvalidParameter, "function table x values must be distinct");
  }
  std::vector<double> knots;
  for (const auto& r : rows) knots.push_back(r[0]);
  auto locate = [rows](double x) {
    std::size_t i = 1;
    while (i + 1 < rows.size() && x > rows[i][0]) ++i;
    return i;
  };
  auto value = [rows, locate](double x) {
    if (x <= rows.front()[0]) return rows.front()[1];
    if (x >= rows.back()[0]) return rows.back()[1];
    const std::size_t i = locate(x);
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    const double h = b[0] - a[0];
    const double t = (x - a[0]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a[1] + (t3 - 2 * t2 + t) * h * a[2] + (-2 * t3 + 3 * t2) * b[1] +
           (t3 - t2) * h * b[2];
  };
  auto slope = [rows, locate](double x) {
    if (x <= rows.front()[0] || x >= rows.back()[0]) return 0.0;
    const std::size_t i = locate(x);
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    const double h = b[0] - a[0];
    const double t = (x - a[0]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * a[1] + (3 * t2 - 4 * t + 1) * h * a[2] + (-6 * t2 + 6 * t) * b[1] +
            (3 * t2 - 2 * t) * h * b[2]) /
           h;
  };
  auto d = TestFunction("d(table)", slope).with_breakpoints(knots);
  return TestFunction("table", value, [d] { return d; }).with_breakpoints(knots);
}

TestFunction operator+(const TestFunction& f, const TestFunction& g) {
  std::vector<double> bp(f.breakpoints().begin(), f.breakpoints().end());
  bp.insert(bp.end(), g.breakpoints().begin(), g.breakpoints().end());
  TestFunction::Deriver d;
  if (f.has_analytic_derivative() && g.has_analytic_derivative()) d = [f, g] { return f.derivative() + g.derivative(); };
  TestFunction out(f.label() + "+" + g.label(), [a = f.fn(), b = g.fn()](double x) { return a(x) + b(x); }, d);
  out = out.with_breakpoints(bp);
  if (!f.differencing_allowed() || !g.differencing_allowed()) out = out.without_differencing();
  return out;
}

TestFunction operator*(double a, const TestFunction& f) {
  TestFunction::Deriver d;
  if (f.has_analytic_derivative()) d = [a, f] { return a * f.derivative(); };
  TestFunction out(num(a) + "*" + f.label(), [a, v = f.fn()](double x) { return a * v(x); }, d);
  out = out.with_breakpoints({f.breakpoints().begin(), f.breakpoints().end()});
  return f.differencing_allowed() ? out : out.without_differencing();
}

TestFunction operator-(const TestFunction& f, const TestFunction& g) { return (f + (-1.0) * g).relabel(f.label() + "-" + g.label()); }

TestFunction operator+(const TestFunction& f, double c) {
  return (f + TestFunction::constant(c)).relabel(f.label() + "+" + num(c));
}

TestFunction parse_test_function(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  }
  std::smatch m;
  auto number = [](const std::string& s) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      fail(ErrorCode::ValidationError, "cannot parse number '" + s + "'");
    }
  };
  if (text == "id" || text == "x") return TestFunction::identity();
  if (std::regex_match(text, m, std::regex(R"(x\^(\d+))"))) return TestFunction::power(std::stoi(m[1]));
  if (text == "exp(-x)") return TestFunction::exponential(-1.0);
  if (text == "exp(x)" || text == "exp") return TestFunction::exponential(1.0);
  if (std::regex_match(text, m, std::regex(R"(exp\(([-+0-9.eE]+)\*?x\))"))) return TestFunction::exponential(number(m[1]));
  if (text == "sin" || text == "sin(x)") return TestFunction::sine();
  if (text == "cos" || text == "cos(x)") return TestFunction::sine(std::numbers::pi / 2.0).relabel("cos");
  if (std::regex_match(text, m, std::regex(R"(indicator\(<=([-+0-9.eE]+)\))"))) {
    return TestFunction::indicator_le(number(m[1]));
  }
  if (std::regex_match(text, m, std::regex(R"(smooth_indicator\(([-+0-9.eE]+),([-+0-9.eE]+)\))"))) {
    return TestFunction::smoothed_indicator(number(m[1]), number(m[2]));
  }
  if (std::regex_match(text, m, std::regex(R"(min\(x,([-+0-9.eE]+)\))"))) return TestFunction::min_with(number(m[1]));
  if (std::regex_match(text, m, std::regex(R"(const\(([-+0-9.eE]+)\))"))) return TestFunction::constant(number(m[1]));
  if (std::regex_match(text, m, std::regex(R"(poly\(([-+0-9.eE,]+)\))"))) {
    std::vector<double> c;
    std::stringstream in(m[1].str());
    std::string item;
    while (std::getline(in, item, ',')) c.push_back(number(item));
    return TestFunction::polynomial(c);
  }
  if (text.starts_with("table:")) {
    const std::string path = text.substr(6);
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ValidationError, "cannot open table " + path);
    std::vector<std::array<double, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#' || std::isalpha(static_cast<unsigned char>(line.front()))) continue;
      std::stringstream row(line);
      std::array<double, 3> r{};
      std::string item;
      for (double& v : r) {
        if (!std::getline(row, item, ',')) fail(ErrorCode::ValidationError, "table rows need x,f,df: " + line);
        v = number(item);
      }
      rows.push_back(r);
    }
    return TestFunction::table(std::move(rows));
  }
  fail(ErrorCode::ValidationError, "unknown test function '" + raw + "'");
}

}  // namespace steinvar
