#include "steinvar/numerics.hpp"

#include "steinvar/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace steinvar {

namespace bq = boost::math::quadrature;

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

namespace {

// Integrators grow their node tables lazily, so a nested call must not share
// an instance with the call that encloses it: keep one per nesting depth.
thread_local int nesting_depth = 0;

struct DepthGuard {
  DepthGuard() { ++nesting_depth; }
  ~DepthGuard() { --nesting_depth; }
};

template <class Rule>
Rule& rule_for(int levels) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Rule>> cache;
  auto& slot = cache[{nesting_depth, levels}];
  if (!slot) slot = std::make_unique<Rule>(static_cast<std::size_t>(levels));
  return *slot;
}

std::string range_text(double lo, double hi) {
  std::ostringstream s;
  s << "[" << lo << ", " << hi << "]";
  return s.str();
}

Estimate integrate_piece(const RealFn& f, double lo, double hi, const QuadratureConfig& cfg) {
  if (!(lo < hi)) return {};
  auto g = [&f](double x) { return f(x); };
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  auto run = [&](double tol) {
    if (std::isinf(lo) || std::isinf(hi)) {
      auto& rule = rule_for<bq::exp_sinh<double>>(cfg.max_subdivisions);
      DepthGuard guard;
      value = rule.integrate(g, lo, hi, tol, &error, &l1);
    } else {
      auto& rule = rule_for<bq::tanh_sinh<double>>(cfg.max_subdivisions);
      DepthGuard guard;
      value = rule.integrate(g, lo, hi, tol, &error, &l1);
      // The finite rule scales L1 to [lo, hi] but reports the error on [-1, 1].
      error *= 0.5 * (hi - lo);
    }
  };
  try {
    run(cfg.rel_tol);
    // The rules can stop one level early with an estimate just above the target.
    if (error > std::max(cfg.abs_tol, cfg.rel_tol * l1)) run(cfg.rel_tol * 1e-3);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::NotIntegrable, "quadrature failed on " + range_text(lo, hi) + ": " + e.what());
  }
  if (!std::isfinite(value)) fail(ErrorCode::NotIntegrable, "integral diverges on " + range_text(lo, hi));
  if (error > std::max(cfg.abs_tol, cfg.rel_tol * l1) && std::isinf(lo) != std::isinf(hi)) {
    // A half-line that mixes an endpoint singularity with slow decay: give each its own rule.
    const double cut = std::isinf(hi) ? lo + std::max(1.0, std::abs(lo)) : hi - std::max(1.0, std::abs(hi));
    const Estimate left = integrate_piece(f, lo, cut, cfg);
    const Estimate right = integrate_piece(f, cut, hi, cfg);
    return {left.value + right.value, left.error + right.error};
  }
  if (error > std::max(cfg.abs_tol, cfg.rel_tol * l1)) {
    std::ostringstream msg;
    msg << "error estimate " << error << " (L1 " << l1 << ") on " << range_text(lo, hi);
    fail(ErrorCode::NoConvergence, msg.str());
  }
  return {value, error};
}

}  // namespace

Estimate integrate(const RealFn& f, double lo, double hi, const QuadratureConfig& cfg,
                   std::span<const double> breakpoints) {
  if (!(lo < hi)) return {};
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  if (cuts.empty() && std::isinf(lo) && std::isinf(hi)) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Estimate total;
  CompensatedSum sum;
  double a = lo;
  cuts.push_back(hi);
  for (double b : cuts) {
    const Estimate piece = integrate_piece(f, a, b, cfg);
    sum.add(piece.value);
    total.error += piece.error;
    a = b;
  }
  total.value = sum.value();
  return total;
}

Estimate sum_lattice(const RealFn& f, double lo, double hi, const QuadratureConfig& cfg) {
  constexpr long kMaxTerms = 50'000'000;
  constexpr int kQuietRun = 64;
  if (!(lo <= hi)) return {};
  CompensatedSum sum;
  double tail = 0.0;

  auto walk = [&](long start, long step, double stop) {
    int quiet = 0;
    long count = 0;
    for (long k = start;; k += step) {
      if (std::isfinite(stop) && (step > 0 ? k > stop : k < stop)) return;
      const double term = f(static_cast<double>(k));
      if (!std::isfinite(term)) fail(ErrorCode::NotIntegrable, "non-finite term at k = " + std::to_string(k));
      sum.add(term);
      if (std::isinf(stop)) {
        if (std::abs(term) < cfg.tail_mass_cut * std::max(1.0, std::abs(sum.value()))) {
          tail = std::max(tail, std::abs(term));
          if (++quiet >= kQuietRun) return;
        } else {
          quiet = 0;
        }
      }
      if (++count > kMaxTerms) fail(ErrorCode::NoConvergence, "lattice sum did not settle");
    }
  };

  if (std::isfinite(lo)) {
    walk(static_cast<long>(std::ceil(lo)), 1, hi);
  } else if (std::isfinite(hi)) {
    walk(static_cast<long>(std::floor(hi)), -1, lo);
  } else {
    walk(0, 1, hi);
    walk(-1, -1, lo);
  }
  return {sum.value(), tail * kQuietRun};
}

Estimate integrate(const RealFn& f, const SupportSpec& support, const QuadratureConfig& cfg,
                   std::span<const double> breakpoints) {
  if (support.measure == MeasureKind::Counting) return sum_lattice(f, support.lower, support.upper, cfg);
  return integrate(f, support.lower, support.upper, cfg, breakpoints);
}

Estimate integrate2(const RealFn2& f, const Region2& region, const QuadratureConfig& cfg) {
  double inner_error = 0.0;
  auto outer = [&](double x) {
    const Limits lim = region.inner(x);
    auto g = [&](double y) { return f(x, y); };
    Estimate e;
    if (region.inner_measure == MeasureKind::Counting) {
      e = sum_lattice(g, std::ceil(lim.lo), std::floor(lim.hi), cfg);
    } else {
      std::vector<double> breaks;
      if (region.inner_breakpoints) breaks = region.inner_breakpoints(x);
      e = integrate(g, lim.lo, lim.hi, cfg, breaks);
    }
    inner_error = std::max(inner_error, e.error);
    return e.value;
  };
  Estimate out = integrate(outer, region.outer, cfg, region.outer_breakpoints);
  out.error += inner_error;
  return out;
}

Estimate integrate2(const RealFn2& f, const SupportSpec& sx, const SupportSpec& sy, const QuadratureConfig& cfg,
                    std::span<const double> breakpoints_x, std::span<const double> breakpoints_y) {
  Region2 region;
  region.outer = sx;
  region.inner = [sy](double) { return Limits{sy.lower, sy.upper}; };
  region.inner_measure = sy.measure;
  region.outer_breakpoints.assign(breakpoints_x.begin(), breakpoints_x.end());
  std::vector<double> by(breakpoints_y.begin(), breakpoints_y.end());
  region.inner_breakpoints = [by](double) { return by; };
  return integrate2(f, region, cfg);
}

double comparison_tolerance(double error_estimate) { return std::max(10.0 * error_estimate, 1e-10); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

McEstimate mc_expect(const std::function<double(std::span<const double>)>& f, const Sampler& draw,
                     std::size_t arity, const MonteCarloConfig& cfg) {
  constexpr std::size_t kChunk = 4096;
  if (cfg.samples < 100) fail(ErrorCode::InvalidParameter, "Monte Carlo needs at least 100 samples");
  if (arity == 0) fail(ErrorCode::InvalidParameter, "arity must be positive");
  const std::size_t chunks = (cfg.samples + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks, 0.0);
  std::vector<double> squares(chunks, 0.0);
  std::vector<std::exception_ptr> errors(chunks);

#pragma omp parallel for schedule(static)
  for (long c = 0; c < static_cast<long>(chunks); ++c) {
    try {
      std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(c))));
      std::vector<double> xs(arity);
      const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
      const std::size_t end = std::min(cfg.samples, begin + kChunk);
      CompensatedSum s;
      CompensatedSum s2;
      for (std::size_t i = begin; i < end; ++i) {
        for (auto& x : xs) x = draw(rng);
        const double v = f(xs);
        s.add(v);
        s2.add(v * v);
      }
      sums[c] = s.value();
      squares[c] = s2.value();
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CompensatedSum s;
  CompensatedSum s2;
  for (std::size_t c = 0; c < chunks; ++c) {
    s.add(sums[c]);
    s2.add(squares[c]);
  }
  const double n = static_cast<double>(cfg.samples);
  const double mean = s.value() / n;
  McEstimate out{mean, 0.0};
  if (cfg.report_stderr) {
    const double var = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::InvalidParameter, "matrix must be square");
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return symmetric_eigenvalues(a).minCoeff();
}

}  // namespace steinvar
