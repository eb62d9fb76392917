#pragma once
// Shared scalar types, a small dense matrix, and the error type.

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmir {

using Int = mpz_class;
using Rat = mpq_class;
using cplx = std::complex<double>;
using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

// Errors carry a stable code (e.g. "ConditionAViolated") plus a witness string.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)), detail_(detail) {}
  const std::string& code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

template <class T>
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<T> a;
  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}
  T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(a.begin() + i * cols, a.begin() + (i + 1) * cols);
  }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows);
    for (std::size_t i = 0; i < rows; ++i) c[i] = (*this)(i, j);
    return c;
  }
  Mat transpose() const {
    Mat t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

using IntMatrix = Mat<Int>;
using RatMatrix = Mat<Rat>;

template <class T>
Mat<T> operator*(const Mat<T>& x, const Mat<T>& y) {
  if (x.cols != y.rows) throw Error("DimensionMismatch", "matrix product");
  Mat<T> z(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      if (x(i, k) == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) z(i, j) += x(i, k) * y(k, j);
    }
  return z;
}

inline RatMatrix to_rat(const IntMatrix& m) {
  RatMatrix r(m.rows, m.cols);
  for (std::size_t k = 0; k < m.a.size(); ++k) r.a[k] = Rat(m.a[k]);
  return r;
}

// Canonical a/b (gmpxx constructors do not canonicalize).
inline Rat ratio(const Int& a, const Int& b) {
  Rat q(a, b);
  q.canonicalize();
  return q;
}

// floor / ceil / fractional part of rationals
inline Int floor_q(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}
inline Int ceil_q(const Rat& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}
inline Rat frac_q(const Rat& x) { return x - Rat(floor_q(x)); }
inline bool is_int(const Rat& x) { return x.get_den() == 1; }

inline std::string to_str(const Rat& x) { return x.get_str(); }
inline std::string to_str(const Int& x) { return x.get_str(); }

inline double to_d(const Rat& x) { return x.get_d(); }

// Inner product <D_i, d> for integer row and rational vector.
inline Rat dot(const IntVec& u, const RatVec& v) {
  Rat s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += Rat(u[i]) * v[i];
  return s;
}
inline Rat dot(const RatVec& u, const RatVec& v) {
  Rat s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

}  // namespace tmir
