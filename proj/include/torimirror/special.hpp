#pragma once
// Hurwitz zeta, digamma and Gamma-function power series at rational points.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "torimirror/common.hpp"

namespace tmir::special {

using Real = boost::multiprecision::cpp_bin_float_50;
using Series = std::vector<Real>;

constexpr int kMaxDigits = 45;
constexpr int kDefaultDigits = 30;

// digits in (0, kMaxDigits]; throws PrecisionUnattainable otherwise
void check_digits(int digits);

Rat bernoulli(int k);  // B_1 = -1/2
Real to_real(const Rat& x);

Real hurwitz_zeta(int s, const Rat& a, int digits = kDefaultDigits);  // s >= 2, a > 0
Real digamma(const Rat& a, int digits = kDefaultDigits);              // a > 0
Real polygamma(int k, const Rat& a, int digits = kDefaultDigits);     // psi^(k)(a)
Real lgamma(const Rat& a);                                            // a > 0

Series series_mul(const Series& a, const Series& b, std::size_t order);
Series series_exp(const Series& f, std::size_t order);

// coefficients of x^0..x^order
Series log_gamma_series(const Rat& a, std::size_t order, int digits = kDefaultDigits);  // a > 0
Series gamma_series(const Rat& a, std::size_t order, int digits = kDefaultDigits);      // a > 0
Series rgamma_series(const Rat& a, std::size_t order, int digits = kDefaultDigits);     // 1/Gamma(a+x), any a

std::vector<double> to_double(const Series& s);

}  // namespace tmir::special
