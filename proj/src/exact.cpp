#include "steinvar/exact.hpp"

namespace steinvar {

Integer binomial_coefficient(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Integer out = 1;
  for (long i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

LatticeTable<Rational> exact_binomial(long n, const Rational& p) {
  if (n < 1 || p <= 0 || p >= 1) fail(ErrorCode::InvalidParameter, "binomial needs n >= 1 and 0 < p < 1");
  std::vector<Rational> masses;
  masses.reserve(static_cast<std::size_t>(n + 1));
  const Rational q = 1 - p;
  for (long k = 0; k <= n; ++k) {
    Rational m = Rational(binomial_coefficient(n, k));
    for (long i = 0; i < k; ++i) m *= p;
    for (long i = 0; i < n - k; ++i) m *= q;
    masses.push_back(m);
  }
  return LatticeTable<Rational>(0, std::move(masses));
}

LatticeTable<Rational> exact_hypergeometric(long population, long successes, long draws) {
  if (population < 1 || successes < 0 || successes > population || draws < 1 || draws > population) {
    fail(ErrorCode::InvalidParameter, "hypergeometric needs 0 <= K <= N and 1 <= n <= N");
  }
  const long lo = std::max(0L, draws - (population - successes));
  const long hi = std::min(draws, successes);
  const Rational denom = Rational(binomial_coefficient(population, draws));
  std::vector<Rational> masses;
  for (long k = lo; k <= hi; ++k) {
    masses.push_back(Rational(binomial_coefficient(successes, k) *
                              binomial_coefficient(population - successes, draws - k)) /
                     denom);
  }
  return LatticeTable<Rational>(lo, std::move(masses));
}

LatticeTable<Rational> exact_table(long lo, std::vector<Rational> masses) {
  Rational total = 0;
  for (const auto& m : masses) total += m;
  if (total != 1) fail(ErrorCode::NotNormalized, "exact masses must sum to one");
  return LatticeTable<Rational>(lo, std::move(masses));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace steinvar
