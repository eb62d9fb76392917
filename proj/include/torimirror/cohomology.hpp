#pragma once
// Sector rings H*(X_v) = Q[pbar_1..pbar_r']/J_v, integration, orbifold pairing, grading.

#include <memory>

#include "torimirror/stack.hpp"

namespace tmir::cohomology {

using Exponent = std::vector<int>;
using Sparse = std::vector<std::pair<std::size_t, Rat>>;

template <class T>
inline T from_rat(const Rat& x) {
  if constexpr (std::is_same_v<T, Rat>) return x;
  else return T(x.get_d());
}

struct SectorRing {
  stack::Subset support = 0;
  int top = 0;                      // n_v
  std::size_t nvars = 0;            // r'
  std::vector<Exponent> basis;      // graded lex, degree ascending
  std::vector<int> degree;          // per basis element (complex degree)
  std::vector<std::size_t> deg_begin;  // deg_begin[k] = first basis index of degree k, size top+2
  std::vector<Sparse> mult;         // mult[i*dim+j]
  std::vector<std::vector<Sparse>> var_mult;  // var_mult[a][i] = pbar_a * basis_i
  std::vector<RatVec> dbar;         // dbar[i] = D-bar_i as a vector over the basis (degree 1)
  Rat top_integral;                 // integral of the top basis element
  std::vector<int> hilbert;         // dims per degree

  std::size_t dim() const { return basis.size(); }
  RatVec normal_form(const Exponent& e) const;  // monomial -> basis coefficients

  // cached reduction data per degree
  std::vector<std::vector<Exponent>> monos;          // monomials of degree k, descending grlex
  std::vector<std::vector<RatVec>> rref_rows;        // rows in column order of monos[k]
  std::vector<std::vector<std::size_t>> rref_piv;
};

SectorRing build_sector_ring(const stack::InertiaData& X, const stack::NefBasis& B, stack::Subset support);

class Cohomology {
 public:
  Cohomology(const stack::InertiaData& X, const stack::NefBasis& B);

  const stack::InertiaData& X() const { return *X_; }
  const stack::NefBasis& basis() const { return *B_; }
  std::size_t sectors() const { return X_->box.size(); }
  const SectorRing& ring(std::size_t v) const { return *rings_[v]; }
  std::size_t offset(std::size_t v) const { return offset_[v]; }
  std::size_t total_dim() const { return total_; }
  int n() const { return static_cast<int>(X_->n); }

  // global basis bookkeeping
  std::size_t sector_of_index(std::size_t k) const { return sector_of_[k]; }
  int hdeg(std::size_t k) const;   // H*(IX) complex degree of global basis element k
  Rat orbdeg_half(std::size_t k) const;  // deg_orb / 2 = hdeg + age
  std::string label(std::size_t k) const;  // e.g. "p1^2*1_v0"

  template <class T>
  std::vector<T> zero() const { return std::vector<T>(total_, T(0)); }
  template <class T>
  std::vector<T> unit(std::size_t v) const {
    auto z = zero<T>();
    z[offset_[v]] = T(1);
    return z;
  }
  template <class T>
  std::vector<T> one() const {
    auto z = zero<T>();
    for (std::size_t v = 0; v < sectors(); ++v) z[offset_[v]] = T(1);
    return z;
  }
  // untwisted top class normalized to integral 1
  template <class T>
  std::vector<T> point_class() const {
    auto z = zero<T>();
    const auto& R = ring(0);
    z[offset_[0] + R.dim() - 1] = from_rat<T>(1 / R.top_integral);
    return z;
  }

  // sector-local operations (vectors of length ring(v).dim())
  template <class T>
  std::vector<T> mul_local(std::size_t v, const std::vector<T>& a, const std::vector<T>& b) const;
  template <class T>
  std::vector<T> series_local(std::size_t v, const std::vector<T>& coeffs, const std::vector<T>& x) const;
  template <class T>
  std::vector<T> dbar_local(std::size_t v, std::size_t i) const;

  // global operations
  template <class T>
  std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b) const;
  template <class T>
  std::vector<T> sector_part(const std::vector<T>& a, std::size_t v) const;
  template <class T>
  void set_sector(std::vector<T>& a, std::size_t v, const std::vector<T>& loc) const;
  template <class T>
  T integrate(const std::vector<T>& a) const;  // sum over sectors of top parts
  template <class T>
  T integrate_sector_top(std::size_t v, const std::vector<T>& loc) const;  // throws DegreeMismatch
  template <class T>
  T pairing(const std::vector<T>& a, const std::vector<T>& b) const;
  template <class T>
  std::vector<T> inv_star(const std::vector<T>& a) const;
  template <class T>
  std::vector<T> mu(const std::vector<T>& a) const;
  template <class T>
  std::vector<T> rho_multiply(const std::vector<T>& a) const;
  template <class T>
  std::vector<T> class_of_dbar(std::size_t i) const;  // D-bar_i on every sector

  RatMatrix pairing_matrix() const;

 private:
  const stack::InertiaData* X_;
  const stack::NefBasis* B_;
  std::vector<std::shared_ptr<SectorRing>> rings_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> sector_of_;
  std::size_t total_ = 0;
};

// ---------------------------------------------------------------- templates

template <class T>
std::vector<T> Cohomology::mul_local(std::size_t v, const std::vector<T>& a, const std::vector<T>& b) const {
  const auto& R = ring(v);
  const std::size_t d = R.dim();
  std::vector<T> out(d, T(0));
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] == T(0)) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (b[j] == T(0)) continue;
      T ab = a[i] * b[j];
      for (const auto& [k, c] : R.mult[i * d + j]) out[k] += ab * from_rat<T>(c);
    }
  }
  return out;
}

// sum_k coeffs[k] x^k for x nilpotent (zero degree-0 part)
template <class T>
std::vector<T> Cohomology::series_local(std::size_t v, const std::vector<T>& coeffs, const std::vector<T>& x) const {
  const auto& R = ring(v);
  std::vector<T> out(R.dim(), T(0)), pw(R.dim(), T(0));
  pw[0] = T(1);
  for (std::size_t k = 0; k < coeffs.size() && k <= static_cast<std::size_t>(R.top); ++k) {
    for (std::size_t i = 0; i < R.dim(); ++i) out[i] += coeffs[k] * pw[i];
    pw = mul_local(v, pw, x);
  }
  return out;
}

template <class T>
std::vector<T> Cohomology::dbar_local(std::size_t v, std::size_t i) const {
  const auto& R = ring(v);
  std::vector<T> out(R.dim());
  for (std::size_t k = 0; k < R.dim(); ++k) out[k] = from_rat<T>(R.dbar[i][k]);
  return out;
}

template <class T>
std::vector<T> Cohomology::sector_part(const std::vector<T>& a, std::size_t v) const {
  return std::vector<T>(a.begin() + offset_[v], a.begin() + offset_[v] + ring(v).dim());
}

template <class T>
void Cohomology::set_sector(std::vector<T>& a, std::size_t v, const std::vector<T>& loc) const {
  std::copy(loc.begin(), loc.end(), a.begin() + offset_[v]);
}

template <class T>
std::vector<T> Cohomology::mul(const std::vector<T>& a, const std::vector<T>& b) const {
  auto out = zero<T>();
  for (std::size_t v = 0; v < sectors(); ++v)
    set_sector(out, v, mul_local(v, sector_part(a, v), sector_part(b, v)));
  return out;
}

template <class T>
T Cohomology::integrate(const std::vector<T>& a) const {
  T s(0);
  for (std::size_t v = 0; v < sectors(); ++v) {
    const auto& R = ring(v);
    s += a[offset_[v] + R.dim() - 1] * from_rat<T>(R.top_integral);
  }
  return s;
}

template <class T>
T Cohomology::integrate_sector_top(std::size_t v, const std::vector<T>& loc) const {
  const auto& R = ring(v);
  for (std::size_t k = 0; k + 1 < R.dim(); ++k)
    if (loc[k] != T(0)) throw Error("DegreeMismatch", "class is not of top degree on sector " + std::to_string(v));
  return loc[R.dim() - 1] * from_rat<T>(R.top_integral);
}

template <class T>
std::vector<T> Cohomology::inv_star(const std::vector<T>& a) const {
  auto out = zero<T>();
  for (std::size_t v = 0; v < sectors(); ++v) set_sector(out, X_->box[v].inv, sector_part(a, v));
  return out;
}

template <class T>
T Cohomology::pairing(const std::vector<T>& a, const std::vector<T>& b) const {
  return integrate(mul(a, inv_star(b)));
}

template <class T>
std::vector<T> Cohomology::mu(const std::vector<T>& a) const {
  std::vector<T> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    out[k] = a[k] * from_rat<T>(orbdeg_half(k) - Rat(n(), 2));
  return out;
}

template <class T>
std::vector<T> Cohomology::class_of_dbar(std::size_t i) const {
  auto out = zero<T>();
  for (std::size_t v = 0; v < sectors(); ++v) set_sector(out, v, dbar_local<T>(v, i));
  return out;
}

template <class T>
std::vector<T> Cohomology::rho_multiply(const std::vector<T>& a) const {
  auto rho = zero<T>();
  for (std::size_t i = 0; i < X_->m; ++i) {
    auto di = class_of_dbar<T>(i);
    for (std::size_t k = 0; k < total_; ++k) rho[k] += di[k];
  }
  return mul(rho, a);
}

}  // namespace tmir::cohomology
