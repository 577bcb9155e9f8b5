#include "steinvar/grid.hpp"

#include "steinvar/errors.hpp"
#include "steinvar/representations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace steinvar {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidParameter, "bad grid value '" + s + "' in '" + text + "'");
    }
  };
  std::vector<std::string> parts;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) fail(ErrorCode::InvalidParameter, "grid must be a:b:step, got '" + text + "'");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || !(a <= b)) fail(ErrorCode::InvalidParameter, "grid needs a <= b and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 10'000'000) fail(ErrorCode::InvalidParameter, "grid too large");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + step * static_cast<double>(i);
    return out;
  }
  std::vector<double> out;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(number(p));
  if (out.empty()) fail(ErrorCode::InvalidParameter, "empty grid");
  return out;
}

std::vector<double> support_grid(const Distribution& dist, std::size_t n) {
  const SupportSpec s = dist.effective_support();
  std::vector<double> out;
  if (dist.is_discrete()) {
    const long lo = static_cast<long>(s.lower);
    const long hi = static_cast<long>(s.upper);
    const long width = hi - lo + 1;
    const long stride = std::max<long>(1, (width + static_cast<long>(n) - 1) / static_cast<long>(std::max<std::size_t>(n, 1)));
    for (long k = lo; k <= hi; k += stride) out.push_back(static_cast<double>(k));
    if (out.back() != static_cast<double>(hi)) out.push_back(static_cast<double>(hi));
    return out;
  }
  for (double q : linspace(1e-6, 1.0 - 1e-6, n)) out.push_back(dist.quantile(q));
  for (double b : dist.breakpoints()) {
    if (b > s.lower && b < s.upper) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> evaluate(const RealFn& f, std::span<const double> xs, Execution exec) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(xs[i]);
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = f(xs[i]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double max_discrepancy(const RealFn& f, const RealFn& g, std::span<const double> xs, Execution exec) {
  const auto a = evaluate(f, xs, exec);
  const auto b = evaluate(g, xs, exec);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

Eigen::MatrixXd kernel_matrix(const Distribution& dist, Shift ell, std::span<const double> xs, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  Eigen::MatrixXd k(n, n);
  auto row = [&](std::ptrdiff_t i) {
    for (std::ptrdiff_t j = 0; j < n; ++j) k(i, j) = kernel_K(dist, ell, xs[i], xs[j]);
  };
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) row(i);
    return k;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) row(i);
  return k;
}

double kernel_quadratic_form(const Eigen::MatrixXd& k, std::span<const double> u) {
  if (static_cast<std::size_t>(k.rows()) != u.size()) fail(ErrorCode::InvalidParameter, "size mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
  return v.dot(k * v);
}

}  // namespace steinvar
