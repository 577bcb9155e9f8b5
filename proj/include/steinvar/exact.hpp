#pragma once

#include "steinvar/lattice.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace steinvar {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

Integer binomial_coefficient(long n, long k);

LatticeTable<Rational> exact_binomial(long n, const Rational& p);
LatticeTable<Rational> exact_hypergeometric(long population, long successes, long draws);
/// Table from masses that must already sum to one.
LatticeTable<Rational> exact_table(long lo, std::vector<Rational> masses);

double to_double(const Rational& r);

}  // namespace steinvar
