#include "steinvar/distribution.hpp"

#include "steinvar/errors.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/hypergeometric.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace steinvar {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::InvalidParameter, message);
}

/// Uniform draw in (0, 1) built from raw engine output so sampling does not
/// depend on the standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

/// x^c with the conventions 0^0 = 1 handled through the log form.
double log_power_term(double c, double logx) { return c == 0.0 ? 0.0 : c * logx; }

long find_quantile_index(const LatticeTable<double>& t, double q) {
  long lo = t.lo();
  long hi = t.hi();
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (t.cdf(mid) >= q) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

/// Fills pdf/cdf/sf/sampler/quantile-related members of a lattice model from its table.
void install_lattice(DistributionModel& m, LatticeTable<double> table) {
  auto t = std::make_shared<const LatticeTable<double>>(std::move(table));
  auto integral = [](double x) { return x == std::floor(x) && std::abs(x) < 9e15; };
  m.pdf = [t, integral](double x) { return integral(x) ? t->pmf(static_cast<long>(x)) : 0.0; };
  m.log_pdf = [t, integral](double x) {
    const double v = integral(x) ? t->pmf(static_cast<long>(x)) : 0.0;
    return v > 0.0 ? std::log(v) : -kInf;
  };
  m.cdf = [t](double x) {
    if (x < static_cast<double>(t->lo())) return 0.0;
    if (x >= static_cast<double>(t->hi())) return std::min(1.0, t->cdf(t->hi()));
    return t->cdf(static_cast<long>(std::floor(x)));
  };
  m.sf = [t](double x) {
    if (x < static_cast<double>(t->lo())) return 1.0;
    if (x > static_cast<double>(t->hi())) return 0.0;
    return t->sf(static_cast<long>(std::floor(x)));
  };
  m.sampler = [t](std::mt19937_64& rng) { return static_cast<double>(find_quantile_index(*t, uniform01(rng))); };
  Accumulator<double> mean, second;
  for (long k = t->lo(); k <= t->hi(); ++k) mean.add(static_cast<double>(k) * t->pmf(k));
  for (long k = t->lo(); k <= t->hi(); ++k) {
    const double d = static_cast<double>(k) - mean.value();
    second.add(d * d * t->pmf(k));
  }
  m.mean = mean.value();
  m.variance = second.value();
  m.lattice = *t;
}

double bisect_quantile(const RealFn& cdf, const SupportSpec& support, double centre, double spread, double q) {
  double lo = support.lower;
  double hi = support.upper;
  spread = std::max(spread, 1e-300);
  if (std::isinf(lo)) {
    lo = centre - spread;
    while (cdf(lo) > q) lo = centre - 2.0 * (centre - lo);
  }
  if (std::isinf(hi)) {
    hi = centre + spread;
    while (cdf(hi) < q) hi = centre + 2.0 * (hi - centre);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::shared_ptr<DistributionModel> build(const Normal& p) {
  require(std::isfinite(p.mean) && p.variance > 0.0 && std::isfinite(p.variance), "normal needs variance > 0");
  auto m = std::make_shared<DistributionModel>();
  const double mu = p.mean;
  const double s2 = p.variance;
  const double s = std::sqrt(s2);
  m->label = "Normal(" + fmt(mu) + ", " + fmt(s2) + ")";
  m->support = {-kInf, kInf, MeasureKind::Lebesgue};
  m->log_pdf = [=](double x) { return -0.5 * (x - mu) * (x - mu) / s2 - 0.5 * std::log(2.0 * std::numbers::pi * s2); };
  m->pdf = [lp = m->log_pdf](double x) { return std::exp(lp(x)); };
  m->cdf = [=](double x) { return 0.5 * std::erfc(-(x - mu) / (s * std::numbers::sqrt2)); };
  m->sf = [=](double x) { return 0.5 * std::erfc((x - mu) / (s * std::numbers::sqrt2)); };
  m->score = [=](double x) { return -(x - mu) / s2; };
  m->mean = mu;
  m->variance = s2;
  m->sampler = [=](std::mt19937_64& rng) {
    return mu - s * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * uniform01(rng));
  };
  m->breakpoints = {mu};
  return m;
}

std::shared_ptr<DistributionModel> build(const Beta& p) {
  require(p.alpha > 0.0 && p.beta > 0.0 && std::isfinite(p.alpha) && std::isfinite(p.beta),
          "beta needs alpha, beta > 0");
  auto m = std::make_shared<DistributionModel>();
  const double a = p.alpha;
  const double b = p.beta;
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  m->label = "Beta(" + fmt(a) + ", " + fmt(b) + ")";
  m->support = {0.0, 1.0, MeasureKind::Lebesgue};
  m->log_pdf = [=](double x) {
    if (x < 0.0 || x > 1.0) return -kInf;
    return log_power_term(a - 1.0, std::log(x)) + log_power_term(b - 1.0, std::log1p(-x)) - lbeta;
  };
  if (b < 1.0) {
    m->upper_log_pdf = [=](double t) {
      if (t < 0.0 || t > 1.0) return -kInf;
      return log_power_term(a - 1.0, std::log1p(-t)) + log_power_term(b - 1.0, std::log(t)) - lbeta;
    };
  }
  m->pdf = [lp = m->log_pdf](double x) { return std::exp(lp(x)); };
  m->cdf = [=](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
  };
  m->sf = [=](double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return boost::math::ibetac(a, b, x);
  };
  m->score = [=](double x) { return (a - 1.0) / x - (b - 1.0) / (1.0 - x); };
  m->mean = a / (a + b);
  m->variance = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  m->sampler = [=](std::mt19937_64& rng) { return boost::math::ibeta_inv(a, b, uniform01(rng)); };
  return m;
}

std::shared_ptr<DistributionModel> build(const Gamma& p) {
  require(p.shape > 0.0 && p.scale > 0.0 && std::isfinite(p.shape) && std::isfinite(p.scale),
          "gamma needs shape, scale > 0");
  auto m = std::make_shared<DistributionModel>();
  const double a = p.shape;
  const double b = p.scale;
  const double norm = std::lgamma(a) + a * std::log(b);
  m->label = "Gamma(" + fmt(a) + ", " + fmt(b) + ")";
  m->support = {0.0, kInf, MeasureKind::Lebesgue};
  m->log_pdf = [=](double x) {
    if (x < 0.0) return -kInf;
    return log_power_term(a - 1.0, std::log(x)) - x / b - norm;
  };
  m->pdf = [lp = m->log_pdf](double x) { return std::exp(lp(x)); };
  m->cdf = [=](double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, x / b); };
  m->sf = [=](double x) { return x <= 0.0 ? 1.0 : boost::math::gamma_q(a, x / b); };
  m->score = [=](double x) { return (a - 1.0) / x - 1.0 / b; };
  m->mean = a * b;
  m->variance = a * b * b;
  m->sampler = [=](std::mt19937_64& rng) { return b * boost::math::gamma_p_inv(a, uniform01(rng)); };
  return m;
}

std::shared_ptr<DistributionModel> build(const Laplace& p) {
  require(std::isfinite(p.location) && p.scale > 0.0 && std::isfinite(p.scale), "laplace needs scale > 0");
  auto m = std::make_shared<DistributionModel>();
  const double mu = p.location;
  const double b = p.scale;
  m->label = "Laplace(" + fmt(mu) + ", " + fmt(b) + ")";
  m->support = {-kInf, kInf, MeasureKind::Lebesgue};
  m->log_pdf = [=](double x) { return -std::abs(x - mu) / b - std::log(2.0 * b); };
  m->pdf = [lp = m->log_pdf](double x) { return std::exp(lp(x)); };
  m->cdf = [=](double x) { return x < mu ? 0.5 * std::exp((x - mu) / b) : 1.0 - 0.5 * std::exp(-(x - mu) / b); };
  m->sf = [=](double x) { return x < mu ? 1.0 - 0.5 * std::exp((x - mu) / b) : 0.5 * std::exp(-(x - mu) / b); };
  m->score = [=](double x) { return x > mu ? -1.0 / b : (x < mu ? 1.0 / b : 0.0); };
  m->mean = mu;
  m->variance = 2.0 * b * b;
  m->sampler = [=](std::mt19937_64& rng) {
    const double u = uniform01(rng);
    return u < 0.5 ? mu + b * std::log(2.0 * u) : mu - b * std::log(2.0 * (1.0 - u));
  };
  m->breakpoints = {mu};
  return m;
}

std::shared_ptr<DistributionModel> build(const Binomial& p) {
  require(p.trials >= 1 && p.prob > 0.0 && p.prob < 1.0, "binomial needs n >= 1 and 0 < p < 1");
  auto m = std::make_shared<DistributionModel>();
  m->label = "Binomial(" + std::to_string(p.trials) + ", " + fmt(p.prob) + ")";
  m->support = {0.0, static_cast<double>(p.trials), MeasureKind::Counting};
  boost::math::binomial_distribution<double> law(static_cast<double>(p.trials), p.prob);
  std::vector<double> masses;
  for (long k = 0; k <= p.trials; ++k) masses.push_back(boost::math::pdf(law, static_cast<double>(k)));
  install_lattice(*m, LatticeTable<double>(0, std::move(masses)));
  m->mean = p.trials * p.prob;
  m->variance = p.trials * p.prob * (1.0 - p.prob);
  if (p.trials <= 2000) m->exact = exact_binomial(p.trials, to_rational(p.prob));
  return m;
}

std::shared_ptr<DistributionModel> build(const Poisson& p) {
  require(p.rate > 0.0 && std::isfinite(p.rate), "poisson needs lambda > 0");
  auto m = std::make_shared<DistributionModel>();
  const double lambda = p.rate;
  m->label = "Poisson(" + fmt(lambda) + ")";
  const double log_lambda = std::log(lambda);
  auto log_mass = [=](double x) {
    if (x < 0.0 || x != std::floor(x)) return -kInf;
    return x * log_lambda - lambda - std::lgamma(x + 1.0);
  };
  // The table covers every point whose mass is representable, so tail sums
  // divided by p(x) keep full relative accuracy.
  constexpr double kLogFloor = -700.0;
  const long mode = static_cast<long>(std::floor(lambda));
  long lo = mode;
  while (lo > 0 && log_mass(static_cast<double>(lo - 1)) > kLogFloor) --lo;
  long hi = mode;
  while (log_mass(static_cast<double>(hi + 1)) > kLogFloor) ++hi;
  const double below = lo > 0 ? boost::math::gamma_q(static_cast<double>(lo), lambda) : 0.0;
  const double above = boost::math::gamma_p(static_cast<double>(hi + 1), lambda);
  std::vector<double> masses;
  for (long k = lo; k <= hi; ++k) masses.push_back(std::exp(log_mass(static_cast<double>(k))));
  m->support = {0.0, kInf, MeasureKind::Counting};
  install_lattice(*m, LatticeTable<double>(lo, std::move(masses), below, above));
  // Closed-form mass everywhere, so points past the table stay in the support.
  m->log_pdf = log_mass;
  m->pdf = [lp = m->log_pdf](double x) { return std::exp(lp(x)); };
  m->mean = lambda;
  m->variance = lambda;
  return m;
}

std::shared_ptr<DistributionModel> build(const Hypergeometric& p) {
  require(p.population >= 1 && p.successes >= 0 && p.successes <= p.population && p.draws >= 1 &&
              p.draws <= p.population,
          "hypergeometric needs 0 <= K <= N and 1 <= n <= N");
  auto m = std::make_shared<DistributionModel>();
  m->label = "Hypergeometric(" + std::to_string(p.population) + ", " + std::to_string(p.successes) + ", " +
             std::to_string(p.draws) + ")";
  const long lo = std::max(0L, p.draws - (p.population - p.successes));
  const long hi = std::min(p.draws, p.successes);
  require(lo < hi, "hypergeometric support must contain at least two points");
  boost::math::hypergeometric_distribution<double> law(static_cast<unsigned>(p.successes),
                                                       static_cast<unsigned>(p.draws),
                                                       static_cast<unsigned>(p.population));
  std::vector<double> masses;
  for (long k = lo; k <= hi; ++k) masses.push_back(boost::math::pdf(law, static_cast<unsigned>(k)));
  m->support = {static_cast<double>(lo), static_cast<double>(hi), MeasureKind::Counting};
  install_lattice(*m, LatticeTable<double>(lo, std::move(masses)));
  const double N = static_cast<double>(p.population);
  const double K = static_cast<double>(p.successes);
  const double n = static_cast<double>(p.draws);
  m->mean = n * K / N;
  m->variance = n * K / N * (N - K) / N * (N - n) / (N - 1.0);
  if (p.population <= 2000) m->exact = exact_hypergeometric(p.population, p.successes, p.draws);
  return m;
}

}  // namespace

Distribution::Distribution(std::shared_ptr<const DistributionModel> model) : m_(std::move(model)) {
  if (!m_) fail(ErrorCode::InvalidParameter, "null distribution model");
}

double Distribution::pdf(double x) const {
  if (!(x >= m_->support.lower && x <= m_->support.upper)) return 0.0;
  return m_->pdf(x);
}

double Distribution::log_pdf(double x) const {
  if (!(x >= m_->support.lower && x <= m_->support.upper)) return -kInf;
  return m_->log_pdf(x);
}

double Distribution::cdf(double x) const {
  if (x < m_->support.lower) return 0.0;
  if (x >= m_->support.upper) return 1.0;
  return m_->cdf(x);
}

double Distribution::sf(double x) const {
  if (x < m_->support.lower) return 1.0;
  if (x >= m_->support.upper) return 0.0;
  return m_->sf(x);
}

std::optional<double> Distribution::score(double x) const {
  if (!m_->score) return std::nullopt;
  return m_->score(x);
}

double Distribution::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidParameter, "quantile level must lie in (0, 1)");
  if (is_discrete()) return static_cast<double>(find_quantile_index(lattice(), q));
  return bisect_quantile([this](double x) { return cdf(x); }, support(), mean(), std::sqrt(variance()), q);
}

const LatticeTable<double>& Distribution::lattice() const {
  if (!m_->lattice) fail(ErrorCode::UnsupportedSupport, "target has no lattice table");
  return *m_->lattice;
}

SupportSpec Distribution::effective_support() const {
  if (!is_discrete()) return m_->support;
  return {static_cast<double>(lattice().lo()), static_cast<double>(lattice().hi()), MeasureKind::Counting};
}

bool Distribution::in_support(double x) const {
  const SupportSpec& s = m_->support;
  if (is_discrete()) return s.contains(x) && log_pdf(x) > -kInf;
  if (x > s.lower && x < s.upper) return true;
  if (x == s.lower || x == s.upper) {
    const double v = pdf(x);
    return std::isfinite(v) && v > 0.0;
  }
  return false;
}

Distribution make_builtin(const BuiltinFamily& family) {
  std::shared_ptr<DistributionModel> m =
      std::visit([](const auto& p) -> std::shared_ptr<DistributionModel> { return build(p); }, family);
  m->family = family;
  return Distribution(std::move(m));
}

Distribution make_lattice(long lo, std::vector<double> masses, const CustomOptions& options) {
  double total = 0.0;
  for (double v : masses) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidParameter, "masses must be finite and >= 0");
    total += v;
  }
  if (options.require_normalized && std::abs(total - 1.0) > options.normalization_tol) {
    fail(ErrorCode::NotNormalized, "masses sum to " + fmt(total));
  }
  // Trim zero mass at either end so the table spans S(p).
  std::size_t first = 0;
  while (first + 1 < masses.size() && masses[first] == 0.0) ++first;
  std::size_t last = masses.size();
  while (last > first + 1 && masses[last - 1] == 0.0) --last;
  std::vector<double> kept(masses.begin() + static_cast<long>(first), masses.begin() + static_cast<long>(last));
  const long start = lo + static_cast<long>(first);
  if (kept.size() < 2) fail(ErrorCode::InvalidParameter, "a lattice target needs at least two support points");
  if (std::find(kept.begin(), kept.end(), 0.0) != kept.end()) {
    fail(ErrorCode::UnsupportedSupport, "mass must be positive on an integer interval");
  }
  auto m = std::make_shared<DistributionModel>();
  m->label = options.label;
  m->support = {static_cast<double>(start), static_cast<double>(start + static_cast<long>(kept.size()) - 1),
                MeasureKind::Counting};
  install_lattice(*m, LatticeTable<double>(start, std::move(kept)));
  return Distribution(std::move(m));
}

Distribution make_exact_lattice(long lo, std::vector<Rational> masses, std::string label) {
  LatticeTable<Rational> exact = exact_table(lo, masses);
  std::vector<double> approx;
  for (const auto& r : masses) {
    if (r <= 0) fail(ErrorCode::InvalidParameter, "exact masses must be positive on the support");
    approx.push_back(to_double(r));
  }
  if (approx.size() < 2) fail(ErrorCode::InvalidParameter, "a lattice target needs at least two support points");
  auto m = std::make_shared<DistributionModel>();
  m->label = std::move(label);
  m->support = {static_cast<double>(lo), static_cast<double>(lo + static_cast<long>(approx.size()) - 1),
                MeasureKind::Counting};
  install_lattice(*m, LatticeTable<double>(lo, std::move(approx)));
  m->exact = std::move(exact);
  return Distribution(std::move(m));
}

Distribution make_custom(const SupportSpec& support, RealFn density, std::optional<RealFn> cdf,
                         std::optional<RealFn> derivative, const CustomOptions& options) {
  const SupportSpec s = make_support(support.lower, support.upper, support.measure);
  if (!density) fail(ErrorCode::InvalidParameter, "density function required");

  if (s.is_discrete()) {
    std::vector<double> masses;
    long lo = 0;
    if (s.is_bounded()) {
      lo = static_cast<long>(s.lower);
      for (long k = lo; k <= static_cast<long>(s.upper); ++k) masses.push_back(density(static_cast<double>(k)));
    } else {
      if (std::isinf(s.lower)) fail(ErrorCode::UnsupportedSupport, "counting supports must be bounded below");
      lo = static_cast<long>(s.lower);
      double total = 0.0;
      int quiet = 0;
      for (long k = lo; quiet < 64; ++k) {
        const double v = density(static_cast<double>(k));
        masses.push_back(v);
        total += v;
        quiet = (v < options.quadrature.tail_mass_cut * std::max(total, 1e-300)) ? quiet + 1 : 0;
        if (masses.size() > 10'000'000) fail(ErrorCode::NoConvergence, "mass function does not decay");
      }
    }
    CustomOptions opts = options;
    Distribution d = make_lattice(lo, std::move(masses), opts);
    if (!s.is_bounded()) {
      auto m = std::make_shared<DistributionModel>();
      m->label = d.label();
      m->support = {d.support().lower, kInf, MeasureKind::Counting};
      install_lattice(*m, d.lattice());
      return Distribution(std::move(m));
    }
    return d;
  }

  std::vector<double> breaks = options.breakpoints;
  const QuadratureConfig& cfg = options.quadrature;
  const Estimate mass = integrate(density, s.lower, s.upper, cfg, breaks);
  if (options.require_normalized && std::abs(mass.value - 1.0) > options.normalization_tol) {
    fail(ErrorCode::NotNormalized, "density integrates to " + fmt(mass.value));
  }
  if (mass.value <= 0.0) fail(ErrorCode::NotNormalized, "density has no mass");

  auto m = std::make_shared<DistributionModel>();
  m->label = options.label;
  m->support = s;
  m->pdf = density;
  m->log_pdf = [density](double x) {
    const double v = density(x);
    return v > 0.0 ? std::log(v) : -kInf;
  };
  const double total = mass.value;
  m->mean = integrate([&](double x) { return x * density(x); }, s.lower, s.upper, cfg, breaks).value / total;
  const double mu = m->mean;
  m->variance =
      integrate([&](double x) { return (x - mu) * (x - mu) * density(x); }, s.lower, s.upper, cfg, breaks).value /
      total;
  if (std::isinf(s.lower) && std::isinf(s.upper)) breaks.push_back(mu);
  m->breakpoints = breaks;

  if (cdf) {
    m->cdf = *cdf;
    m->sf = [c = *cdf](double x) { return 1.0 - c(x); };
  } else {
    auto left = [=](double x) { return integrate(density, s.lower, x, cfg, breaks).value; };
    auto right = [=](double x) { return integrate(density, x, s.upper, cfg, breaks).value; };
    m->cdf = [=](double x) { return x <= mu ? left(x) : total - right(x); };
    m->sf = [=](double x) { return x <= mu ? total - left(x) : right(x); };
  }
  if (derivative) {
    m->score = [density, d = *derivative](double x) { return d(x) / density(x); };
  }
  m->sampler = [c = m->cdf, s, mu, sd = std::sqrt(m->variance)](std::mt19937_64& rng) {
    return bisect_quantile(c, s, mu, sd, uniform01(rng));
  };
  return Distribution(std::move(m));
}

Distribution make_piecewise_linear(std::vector<std::pair<double, double>> nodes, const CustomOptions& options) {
  if (nodes.size() < 2) fail(ErrorCode::InvalidParameter, "density table needs at least two nodes");
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> xs, ps, cum;
  for (const auto& [x, p] : nodes) {
    if (!std::isfinite(x) || !(p >= 0.0)) fail(ErrorCode::InvalidParameter, "density table needs finite x, p >= 0");
    if (!xs.empty() && x <= xs.back()) fail(ErrorCode::InvalidParameter, "density table x values must be distinct");
    xs.push_back(x);
    ps.push_back(p);
  }
  cum.push_back(0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) cum.push_back(cum.back() + 0.5 * (ps[i] + ps[i - 1]) * (xs[i] - xs[i - 1]));
  const double total = cum.back();
  if (options.require_normalized && std::abs(total - 1.0) > options.normalization_tol) {
    fail(ErrorCode::NotNormalized, "density table integrates to " + fmt(total));
  }
  auto segment = [xs](double x) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(std::max<long>(1, it - xs.begin()));
    return std::min(i, xs.size() - 1);
  };
  auto density = [=](double x) {
    if (x < xs.front() || x > xs.back()) return 0.0;
    const std::size_t i = segment(x);
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ps[i - 1] + w * (ps[i] - ps[i - 1]);
  };
  auto slope = [=](double x) {
    const std::size_t i = segment(x);
    return (ps[i] - ps[i - 1]) / (xs[i] - xs[i - 1]);
  };
  auto cdf = [=](double x) {
    if (x <= xs.front()) return 0.0;
    if (x >= xs.back()) return total;
    const std::size_t i = segment(x);
    return cum[i - 1] + 0.5 * (ps[i - 1] + density(x)) * (x - xs[i - 1]);
  };
  CustomOptions opts = options;
  opts.breakpoints = xs;
  return make_custom(SupportSpec{xs.front(), xs.back(), MeasureKind::Lebesgue}, density, RealFn(cdf),
                     RealFn(slope), opts);
}

bool Diagnostics::ok() const {
  return normalized && support_consistent && cdf_monotonicity_violations == 0 && cdf_lower_error < 1e-8 &&
         cdf_upper_error < 1e-8 && cdf_accumulation_error < 1e-8;
}

Diagnostics validate(const Distribution& dist, const QuadratureConfig& cfg) {
  Diagnostics d;
  const Estimate mass = expect(dist, [](double) { return 1.0; }, cfg);
  d.normalization_error = std::abs(mass.value - 1.0);
  d.normalized = d.normalization_error <= 1e-8;
  if (!d.normalized) d.notes.push_back("NotNormalized: total mass " + fmt(mass.value));

  const Estimate first = expect(dist, [](double x) { return x; }, cfg);
  d.mean_error = std::abs(first.value / mass.value - dist.mean());

  // Grid across the bulk of the law.
  std::vector<double> grid;
  const SupportSpec s = dist.effective_support();
  if (dist.is_discrete()) {
    for (double k = s.lower; k <= s.upper; k += 1.0) grid.push_back(k);
  } else {
    const double lo = std::isfinite(s.lower) ? s.lower : dist.mean() - 10.0 * std::sqrt(dist.variance());
    const double hi = std::isfinite(s.upper) ? s.upper : dist.mean() + 10.0 * std::sqrt(dist.variance());
    for (int i = 0; i <= 200; ++i) grid.push_back(lo + (hi - lo) * i / 200.0);
  }
  double prev = -1.0;
  for (double x : grid) {
    const double c = dist.cdf(x);
    if (c < prev - 1e-14) ++d.cdf_monotonicity_violations;
    prev = c;
  }
  d.cdf_lower_error = std::abs(dist.cdf(s.lower - 1.0));
  d.cdf_upper_error = std::abs(dist.cdf(s.upper) - 1.0);

  // cdf against accumulated density.
  for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 100)) {
    const double x = grid[i];
    const double acc = partial_expect(dist, [](double) { return 1.0; }, s.lower, x, 0.0, cfg).value;
    d.cdf_accumulation_error = std::max(d.cdf_accumulation_error, std::abs(acc - dist.cdf(x)));
  }

  // Zero off the support.
  const SupportSpec full = dist.support();
  for (double x : {full.lower - 1.5, full.lower - 1.0, full.upper + 1.0, full.upper + 2.5}) {
    if (std::isfinite(x) && dist.pdf(x) != 0.0) d.support_consistent = false;
  }
  if (!d.support_consistent) d.notes.push_back("density nonzero outside the support");
  return d;
}

namespace {

std::vector<double> merged_breaks(const Distribution& dist, std::span<const double> extra) {
  std::vector<double> out(dist.breakpoints().begin(), dist.breakpoints().end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace

Estimate expect(const Distribution& dist, const RealFn& f, const QuadratureConfig& cfg,
                std::span<const double> extra_breakpoints) {
  return partial_expect(dist, f, -kInf, kInf, 0.0, cfg, extra_breakpoints);
}

Estimate partial_expect(const Distribution& dist, const RealFn& f, double lo, double hi, double log_scale,
                        const QuadratureConfig& cfg, std::span<const double> extra_breakpoints) {
  const SupportSpec s = dist.effective_support();
  const double a = std::max(lo, s.lower);
  const double b = std::min(hi, s.upper);
  if (dist.is_discrete()) {
    const auto& t = dist.lattice();
    const double scale = std::exp(-log_scale);
    Accumulator<double> acc;
    for (long k = static_cast<long>(std::ceil(a)); k <= static_cast<long>(std::floor(b)); ++k) {
      const double p = t.pmf(k);
      if (p != 0.0) acc.add(f(static_cast<double>(k)) * p * scale);
    }
    return {acc.value(), 0.0};
  }
  if (!(a < b)) return {};
  auto integrand = [&](double y) {
    const double w = std::exp(dist.log_pdf(y) - log_scale);
    return w == 0.0 ? 0.0 : f(y) * w;
  };
  const auto breaks = merged_breaks(dist, extra_breakpoints);
  const RealFn& tail = dist.upper_log_pdf();
  if (!tail || b != s.upper) return integrate(integrand, a, b, cfg, breaks);
  // Upper half in t = b − y so the mass next to a singular end is not lost.
  double c = 0.5 * (a + b);
  if (!(c < b)) c = a;
  const Estimate lower = integrate(integrand, a, c, cfg, breaks);
  std::vector<double> tb;
  for (double x : breaks) {
    if (x > c && x < b) tb.push_back(b - x);
  }
  auto reflected = [&](double t) {
    const double w = std::exp(tail(t) - log_scale);
    // Below one ulp of b the point itself is not representable; use its neighbour.
    const double y = std::min(b - t, std::nextafter(b, a));
    return w == 0.0 ? 0.0 : f(y) * w;
  };
  const Estimate upper = integrate(reflected, 0.0, b - c, cfg, tb);
  return {lower.value + upper.value, lower.error + upper.error};
}

Estimate measure_integral(const Distribution& dist, const RealFn& f, double lo, double hi,
                          const QuadratureConfig& cfg, std::span<const double> extra_breakpoints) {
  const SupportSpec s = dist.effective_support();
  const double a = std::max(lo, s.lower);
  const double b = std::min(hi, s.upper);
  if (dist.is_discrete()) {
    const auto& t = dist.lattice();
    Accumulator<double> acc;
    for (long k = static_cast<long>(std::ceil(a)); k <= static_cast<long>(std::floor(b)); ++k) {
      if (t.pmf(k) != 0.0) acc.add(f(static_cast<double>(k)));
    }
    return {acc.value(), 0.0};
  }
  if (!(a < b)) return {};
  return integrate(f, a, b, cfg, merged_breaks(dist, extra_breakpoints));
}

McEstimate mc_expect(const std::function<double(std::span<const double>)>& f, const Distribution& dist,
                     std::size_t arity, const MonteCarloConfig& cfg) {
  return mc_expect(f, [dist](std::mt19937_64& rng) { return dist.sample(rng); }, arity, cfg);
}

Rational to_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidParameter, "cannot convert a non-finite value to a rational");
  // Continued fraction convergents until the value round-trips.
  Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Rational rest = Rational(x);
  for (int i = 0; i < 200; ++i) {
    const Integer a = boost::multiprecision::numerator(rest) / boost::multiprecision::denominator(rest) -
                      ((rest < 0 && boost::multiprecision::numerator(rest) % boost::multiprecision::denominator(rest) != 0) ? 1 : 0);
    const Integer h2 = a * h1 + h0;
    const Integer k2 = a * k1 + k0;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const Rational candidate(h1, k1);
    if (candidate.convert_to<double>() == x) return candidate;
    const Rational frac = rest - Rational(a);
    if (frac == 0) return candidate;
    rest = 1 / frac;
  }
  return Rational(x);
}

}  // namespace steinvar
