#include "torimirror/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <map>
#include <mutex>

namespace tmir::special {

using boost::multiprecision::abs;
using boost::multiprecision::log;
using boost::multiprecision::pow;

void check_digits(int digits) {
  if (digits <= 0 || digits > kMaxDigits)
    throw Error("PrecisionUnattainable",
                "requested " + std::to_string(digits) + " digits, evaluator certifies at most " +
                    std::to_string(kMaxDigits));
}

Rat bernoulli(int k) {
  static std::mutex mu;
  static std::vector<Rat> B{Rat(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(B.size()) <= k) {
    // sum_{j<n+1} C(n+1,j) B_j = 0
    int n = static_cast<int>(B.size());
    Rat s = 0;
    Int c = 1;
    for (int j = 0; j < n; ++j) {
      s += Rat(c) * B[j];
      c = c * (n + 1 - j) / (j + 1);
    }
    B.push_back(ratio(-s.get_num(), s.get_den() * (n + 1)));
  }
  return B[k];
}

Real to_real(const Rat& x) { return Real(x.get_num().get_str()) / Real(x.get_den().get_str()); }

namespace {

Real tolerance(int digits) { return pow(Real(10), -(digits + 4)); }

// Euler-Maclaurin tail: sum_{j>=1} B_2j/(2j)! * (s)_{2j-1} * x^{-s-2j+1}; stops when terms drop below tol
// returns false if the asymptotic terms stop decreasing first
bool em_tail(int s, const Real& x, const Real& tol, Real& acc) {
  Real poch = s;  // (s)_{2j-1}
  Real fact = 2;  // (2j)!
  Real xp = pow(x, -(s + 1));
  Real prev = -1;
  for (int j = 1; j < 200; ++j) {
    Real term = to_real(bernoulli(2 * j)) / fact * poch * xp;
    if (abs(term) < tol) return true;
    if (prev >= 0 && abs(term) > prev) return false;
    prev = abs(term);
    acc += term;
    poch *= Real(s + 2 * j - 1) * Real(s + 2 * j);
    fact *= Real(2 * j + 1) * Real(2 * j + 2);
    xp /= x * x;
  }
  return false;
}

}  // namespace

Real hurwitz_zeta(int s, const Rat& a, int digits) {
  check_digits(digits);
  if (s < 2 || a <= 0) throw Error("InvalidArgument", "hurwitz_zeta needs s >= 2, a > 0");
  const Real A = to_real(a), tol = tolerance(digits);
  for (int N = 32;; N *= 2) {
    Real acc = 0;
    for (int k = 0; k < N; ++k) acc += pow(A + k, -s);
    Real x = A + N;
    acc += pow(x, 1 - s) / (s - 1) + pow(x, -s) / 2;
    if (em_tail(s, x, tol, acc)) return acc;
    if (N > 1 << 16) throw Error("PrecisionUnattainable", "Euler-Maclaurin did not converge");
  }
}

Real digamma(const Rat& a, int digits) {
  check_digits(digits);
  if (a <= 0) throw Error("InvalidArgument", "digamma needs a > 0");
  const Real A = to_real(a), tol = tolerance(digits);
  for (int N = 32;; N *= 2) {
    Real acc = 0;
    for (int k = 0; k < N; ++k) acc -= 1 / (A + k);
    Real x = A + N;
    acc += log(x) - 1 / (2 * x);
    bool ok = false;
    Real xp = 1 / (x * x), prev = -1;
    for (int j = 1; j < 200; ++j) {
      Real term = to_real(bernoulli(2 * j)) / (2 * j) * xp;
      if (abs(term) < tol) {
        ok = true;
        break;
      }
      if (prev >= 0 && abs(term) > prev) break;
      prev = abs(term);
      acc -= term;
      xp /= x * x;
    }
    if (ok) return acc;
    if (N > 1 << 16) throw Error("PrecisionUnattainable", "Euler-Maclaurin did not converge");
  }
}

Real polygamma(int k, const Rat& a, int digits) {
  if (k == 0) return digamma(a, digits);
  // psi^(k)(a) = (-1)^(k+1) k! zeta(k+1, a)
  Real f = 1;
  for (int j = 2; j <= k; ++j) f *= j;
  Real z = hurwitz_zeta(k + 1, a, digits) * f;
  return (k % 2 == 1) ? z : Real(-z);
}

Real lgamma(const Rat& a) {
  if (a <= 0) throw Error("InvalidArgument", "lgamma needs a > 0");
  return boost::math::lgamma(to_real(a));
}

Series series_mul(const Series& a, const Series& b, std::size_t order) {
  Series out(order + 1, Real(0));
  for (std::size_t i = 0; i < a.size() && i <= order; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) out[i + j] += a[i] * b[j];
  return out;
}

Series series_exp(const Series& f, std::size_t order) {
  Series g(order + 1, Real(0));
  g[0] = boost::multiprecision::exp(f.empty() ? Real(0) : f[0]);
  for (std::size_t k = 1; k <= order; ++k) {
    Real s = 0;
    for (std::size_t j = 1; j <= k && j < f.size(); ++j) s += Real(j) * f[j] * g[k - j];
    g[k] = s / k;
  }
  return g;
}

Series log_gamma_series(const Rat& a, std::size_t order, int digits) {
  static std::mutex mu;
  static std::map<std::tuple<Rat, int>, Series> cache;
  check_digits(digits);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({a, digits});
    if (it != cache.end() && it->second.size() > order) return Series(it->second.begin(), it->second.begin() + order + 1);
  }
  Series c(order + 1);
  c[0] = lgamma(a);
  if (order >= 1) c[1] = digamma(a, digits);
  for (std::size_t k = 2; k <= order; ++k) {
    Real z = hurwitz_zeta(static_cast<int>(k), a, digits) / Real(k);
    c[k] = (k % 2 == 0) ? z : Real(-z);
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[{a, digits}] = c;
  return c;
}

Series gamma_series(const Rat& a, std::size_t order, int digits) {
  return series_exp(log_gamma_series(a, order, digits), order);
}

Series rgamma_series(const Rat& a, std::size_t order, int digits) {
  if (a > 0) {
    auto l = log_gamma_series(a, order, digits);
    for (auto& x : l) x = -x;
    return series_exp(l, order);
  }
  // 1/Gamma(a+x) = prod_{j<k} (a+j+x) / Gamma(a+k+x)
  Int k = ceil_q(Rat(1) - a);
  Series poly{Real(1)};
  for (Int j = 0; j < k; ++j) poly = series_mul(poly, Series{to_real(a + Rat(j)), Real(1)}, order);
  return series_mul(poly, rgamma_series(a + Rat(k), order, digits), order);
}

std::vector<double> to_double(const Series& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(static_cast<double>(x));
  return out;
}

}  // namespace tmir::special
