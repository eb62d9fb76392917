#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include "doctest.h"
#include "torimirror/special.hpp"

using namespace tmir;
using namespace tmir::special;

namespace {
double rel(const Real& a, const Real& b) { return static_cast<double>(abs(a - b) / std::max(Real(1), Real(abs(b)))); }
}  // namespace

TEST_CASE("Bernoulli numbers") {
  CHECK(bernoulli(0) == 1);
  CHECK(bernoulli(1) == Rat(-1, 2));
  CHECK(bernoulli(2) == Rat(1, 6));
  CHECK(bernoulli(4) == Rat(-1, 30));
  CHECK(bernoulli(5) == 0);
  CHECK(bernoulli(12) == Rat(-691, 2730));
}

TEST_CASE("Hurwitz zeta and digamma closed forms") {
  using boost::math::constants::pi;
  Real p = pi<Real>();
  CHECK(rel(hurwitz_zeta(2, Rat(1), 40), p * p / 6) < 1e-40);
  CHECK(rel(hurwitz_zeta(4, Rat(1), 40), p * p * p * p / 90) < 1e-40);
  // zeta(2,1/2) = 3 zeta(2)
  CHECK(rel(hurwitz_zeta(2, Rat(1, 2), 40), p * p / 2) < 1e-40);
  Real g = boost::math::constants::euler<Real>();
  CHECK(rel(digamma(Rat(1), 40), -g) < 1e-40);
  CHECK(rel(digamma(Rat(1, 2), 40), -g - 2 * log(Real(2))) < 1e-40);
}

TEST_CASE("polygamma against boost") {
  for (int k = 0; k <= 6; ++k)
    for (Rat a : {Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(1), Rat(5, 4), Rat(7, 2)}) {
      Real ref = boost::math::polygamma(k, to_real(a));
      CHECK(rel(polygamma(k, a, 40), ref) < 1e-35);
    }
}

TEST_CASE("Gamma series") {
  // Gamma(1+x) = 1 - g x + (g^2/2 + pi^2/12) x^2 + ...
  Real g = boost::math::constants::euler<Real>();
  Real p = boost::math::constants::pi<Real>();
  auto s = gamma_series(Rat(1), 2, 40);
  CHECK(rel(s[0], Real(1)) < 1e-40);
  CHECK(rel(s[1], -g) < 1e-40);
  CHECK(rel(s[2], g * g / 2 + p * p / 12) < 1e-40);

  // summed series against direct evaluation
  for (Rat a : {Rat(1, 3), Rat(1), Rat(-1), Rat(-5, 2), Rat(0), Rat(2)}) {
    auto rs = rgamma_series(a, 40, 40);
    Real x("0.3"), acc = 0, xp = 1;
    for (const auto& c : rs) {
      acc += c * xp;
      xp *= x;
    }
    Real ref = 1 / boost::math::tgamma(to_real(a) + x);
    CHECK(rel(acc, ref) < 1e-18);
  }
  auto z = rgamma_series(Rat(-2), 3, 30);  // 1/Gamma(-2+x) = 2x + O(x^2)
  CHECK(abs(z[0]) < Real(1e-45));
  CHECK(rel(z[1], Real(2)) < 1e-30);
}

TEST_CASE("precision bound") {
  CHECK_THROWS_WITH(check_digits(46), doctest::Contains("PrecisionUnattainable"));
  CHECK_NOTHROW(check_digits(45));
}
