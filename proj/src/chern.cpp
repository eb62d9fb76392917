#include "torimirror/chern.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace tmir::chern {

using stack::has;
using stack::Subset;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);

template <class T>
std::optional<T> phase_t(const Rat& f) {
  Rat g = frac_q(f);
  if (g == 0) return T(1);
  if (g == Rat(1, 2)) return T(-1);
  if constexpr (std::is_same_v<T, Rat>) return std::nullopt;
  else return Chern::phase(g);
}

template <class T>
std::vector<T> inv_factorials(std::size_t k, const T& scale) {
  std::vector<T> c(k + 1);
  c[0] = T(1);
  for (std::size_t j = 1; j <= k; ++j) c[j] = c[j - 1] * scale / T(static_cast<long>(j));
  return c;
}

// power series inverse, s[0] != 0
template <class T>
std::vector<T> series_inverse(const std::vector<T>& s, std::size_t k) {
  std::vector<T> out(k + 1, T(0));
  out[0] = T(1) / s[0];
  for (std::size_t n = 1; n <= k; ++n) {
    T acc(0);
    for (std::size_t j = 1; j <= n && j < s.size(); ++j) acc += s[j] * out[n - j];
    out[n] = -acc / s[0];
  }
  return out;
}

// coefficients of delta/(1-e^{-delta}) (f = 0) or 1/(1-w e^{-delta}) with w = e^{-2 pi i f}
template <class T>
std::optional<std::vector<T>> todd_factor(const Rat& f, std::size_t k) {
  std::vector<T> c(k + 1);
  if (f == 0) {
    Rat fact = 1;
    for (std::size_t j = 0; j <= k; ++j) {
      if (j > 0) fact *= static_cast<long>(j);
      Rat b = special::bernoulli(static_cast<int>(j)) / fact;
      if (j % 2 == 1) b = -b;
      c[j] = cohomology::from_rat<T>(b);
    }
    return c;
  }
  auto w = phase_t<T>(-f);
  if (!w) return std::nullopt;
  std::vector<T> s(k + 1);
  T fact(1);
  for (std::size_t j = 0; j <= k; ++j) {
    if (j > 0) fact *= T(static_cast<long>(j));
    T e = T(1) / fact;
    if (j % 2 == 1) e = -e;
    s[j] = -(*w) * e;
  }
  s[0] += T(1);
  return series_inverse(s, k);
}

template <class T>
std::vector<T> scale_vec(std::vector<T> a, const T& c) {
  for (auto& x : a) x *= c;
  return a;
}

}  // namespace

// ---------------------------------------------------------------- KClass

KClass KClass::line(const IntVec& xi) {
  KClass k;
  k.terms[xi] = 1;
  k.provenance = "line";
  return k;
}

KClass KClass::structure_sheaf(std::size_t r) {
  auto k = line(IntVec(r, Int(0)));
  k.provenance = "O";
  return k;
}

KClass KClass::from_tch(OrbClass value, std::string provenance) {
  KClass k;
  k.direct = std::move(value);
  k.provenance = std::move(provenance);
  return k;
}

KClass KClass::operator+(const KClass& o) const {
  if (direct || o.direct) {
    if (!direct || !o.direct) throw Error("InvalidArgument", "mixing direct and combination K-classes; convert with Chern::tch");
    OrbClass s = *direct;
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += (*o.direct)[k];
    return from_tch(s, "(" + provenance + ")+(" + o.provenance + ")");
  }
  KClass out = *this;
  for (const auto& [xi, c] : o.terms) out.terms[xi] += c;
  for (auto it = out.terms.begin(); it != out.terms.end();) it = (it->second == 0) ? out.terms.erase(it) : std::next(it);
  out.provenance = "(" + provenance + ")+(" + o.provenance + ")";
  return out;
}

KClass KClass::scaled(const Int& c) const {
  KClass out = *this;
  if (direct)
    for (auto& x : *out.direct) x *= c.get_d();
  for (auto& [xi, a] : out.terms) a *= c;
  if (c == 0) out.terms.clear();
  return out;
}

KClass KClass::operator-(const KClass& o) const { return *this + o.scaled(-1); }

// ---------------------------------------------------------------- Chern

Chern::Chern(const cohomology::Cohomology& H, int digits) : H_(&H), digits_(digits) { special::check_digits(digits); }

cplx Chern::phase(const Rat& f) {
  Rat g = frac_q(f);
  if (g == 0) return 1.0;
  if (g == Rat(1, 2)) return -1.0;
  if (g == Rat(1, 4)) return kI;
  if (g == Rat(3, 4)) return -kI;
  return std::polar(1.0, 2 * kPi * g.get_d());
}

template <class T>
std::vector<T> Chern::line_tch_local(std::size_t v, const IntVec& xi) const {
  const auto& X = H_->X();
  const auto& R = H_->ring(v);
  auto ph = phase_t<T>(stack::f_of_xi(X, X.box[v], xi));
  if (!ph) throw Error("InexactPhase", "phase is not +-1");
  IntVec xp = H_->basis().to_p_coords(xi);
  std::vector<T> x(R.dim(), T(0));
  for (std::size_t a = 0; a < R.nvars; ++a) {
    if (xp[a] == 0) continue;
    for (const auto& [k, c] : R.var_mult[a][0]) x[k] += cohomology::from_rat<T>(c * Rat(xp[a]));
  }
  return scale_vec(H_->series_local(v, inv_factorials<T>(R.top, T(1)), x), *ph);
}

template <class T>
std::optional<std::vector<T>> Chern::tch_generic(const KClass& V) const {
  if (V.direct) {
    if constexpr (std::is_same_v<T, cplx>) return *V.direct;
    else return std::nullopt;
  }
  auto out = H_->zero<T>();
  for (const auto& [xi, c] : V.terms)
    for (std::size_t v = 0; v < H_->sectors(); ++v) {
      if constexpr (std::is_same_v<T, Rat>)
        if (!phase_t<Rat>(stack::f_of_xi(H_->X(), H_->X().box[v], xi))) return std::nullopt;
      auto loc = line_tch_local<T>(v, xi);
      T cc = cohomology::from_rat<T>(Rat(c));
      for (std::size_t k = 0; k < loc.size(); ++k) out[H_->offset(v) + k] += cc * loc[k];
    }
  return out;
}

OrbClass Chern::tch(const KClass& V) const { return *tch_generic<cplx>(V); }

std::optional<std::vector<Rat>> Chern::tch_exact(const KClass& V) const { return tch_generic<Rat>(V); }

KClass Chern::tensor(const KClass& a, const KClass& b) const {
  if (a.direct || b.direct) return KClass::from_tch(H_->mul(tch(a), tch(b)), a.provenance + "*" + b.provenance);
  KClass out;
  for (const auto& [x, c] : a.terms)
    for (const auto& [y, e] : b.terms) {
      IntVec z(x.size());
      for (std::size_t k = 0; k < z.size(); ++k) z[k] = x[k] + y[k];
      out.terms[z] += c * e;
    }
  for (auto it = out.terms.begin(); it != out.terms.end();) it = (it->second == 0) ? out.terms.erase(it) : std::next(it);
  out.provenance = a.provenance + "*" + b.provenance;
  return out;
}

KClass Chern::dual(const KClass& a) const {
  if (a.direct) {
    // phases are roots of unity and the eigen-bundle characters are rational
    OrbClass d = *a.direct;
    for (std::size_t k = 0; k < d.size(); ++k) {
      d[k] = std::conj(d[k]);
      if (H_->hdeg(k) % 2 == 1) d[k] = -d[k];
    }
    return KClass::from_tch(d, "dual(" + a.provenance + ")");
  }
  KClass out;
  for (const auto& [x, c] : a.terms) {
    IntVec y(x.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = -x[k];
    out.terms[y] = c;
  }
  out.provenance = "dual(" + a.provenance + ")";
  return out;
}

template <class T>
std::optional<std::vector<T>> Chern::todd_generic() const {
  const auto& X = H_->X();
  auto out = H_->zero<T>();
  for (std::size_t v = 0; v < H_->sectors(); ++v) {
    const auto& R = H_->ring(v);
    std::vector<T> loc(R.dim(), T(0));
    loc[0] = T(1);
    for (std::size_t i = 0; i < X.m; ++i) {
      auto c = todd_factor<T>(frac_q(-X.pair(i, X.box[v].d)), R.top);
      if (!c) return std::nullopt;
      loc = H_->mul_local(v, loc, H_->series_local(v, *c, H_->dbar_local<T>(v, i)));
    }
    H_->set_sector(out, v, loc);
  }
  return out;
}

const OrbClass& Chern::todd_class() const {
  if (!todd_) todd_ = *todd_generic<cplx>();
  return *todd_;
}

std::optional<std::vector<Rat>> Chern::todd_exact() const { return todd_generic<Rat>(); }

const OrbClass& Chern::gamma_class() const {
  if (gamma_) return *gamma_;
  const auto& X = H_->X();
  OrbClass out = H_->zero<cplx>();
  for (std::size_t v = 0; v < H_->sectors(); ++v) {
    const auto& R = H_->ring(v);
    OrbClass loc(R.dim(), 0.0);
    loc[0] = 1.0;
    for (std::size_t i = 0; i < X.m; ++i) {
      Rat f = frac_q(-X.pair(i, X.box[v].d));
      auto g = special::to_double(special::gamma_series(Rat(1) - f, R.top, digits_));
      OrbClass c(g.begin(), g.end());
      loc = H_->mul_local(v, loc, H_->series_local(v, c, H_->dbar_local<cplx>(v, i)));
    }
    H_->set_sector(out, v, loc);
  }
  gamma_ = out;
  return *gamma_;
}

ChiResult Chern::chi(const KClass& V, double tol) const {
  ChiResult res;
  auto te = tch_exact(V);
  auto td = te ? todd_exact() : std::nullopt;
  if (te && td) {
    Rat x = H_->integrate(H_->mul(*te, *td));
    if (!is_int(x)) throw Error("NonIntegerChi", "exact chi = " + to_str(x));
    res.exact = true;
    res.integer = x.get_num();
    res.value = x.get_d();
    return res;
  }
  res.value = H_->integrate(H_->mul(tch(V), todd_class()));
  double rr = std::round(res.value.real());
  if (std::abs(res.value - cplx(rr, 0)) > tol)
    throw Error("NonIntegerChi", "chi = (" + std::to_string(res.value.real()) + "," + std::to_string(res.value.imag()) + ")");
  res.integer = Int(static_cast<long>(rr));
  return res;
}

ChiResult Chern::mukai_pairing(const KClass& V1, const KClass& V2) const { return chi(tensor(dual(V2), V1)); }

OrbClass Chern::psi(const KClass& V) const {
  OrbClass t = H_->inv_star(tch(V));
  for (std::size_t k = 0; k < t.size(); ++k) t[k] *= std::pow(2 * kPi * kI, H_->hdeg(k));
  return scale_vec(H_->mul(gamma_class(), t), cplx(std::pow(2 * kPi, -H_->n() / 2.0)));
}

cplx Chern::sol_pairing(const KClass& V1, const KClass& V2) const {
  OrbClass a = psi(V1), b = psi(V2);
  OrbClass rho = H_->zero<cplx>();
  for (std::size_t i = 0; i < H_->X().m; ++i) {
    auto d = H_->class_of_dbar<cplx>(i);
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] += d[k];
  }
  OrbClass ea = H_->zero<cplx>();
  for (std::size_t v = 0; v < H_->sectors(); ++v) {
    auto e = H_->series_local(v, inv_factorials<cplx>(H_->ring(v).top, kPi * kI), H_->sector_part(rho, v));
    H_->set_sector(ea, v, H_->mul_local(v, e, H_->sector_part(a, v)));
  }
  for (std::size_t k = 0; k < b.size(); ++k)
    b[k] *= std::exp(kPi * kI * Rat(H_->orbdeg_half(k) - Rat(H_->n(), 2)).get_d());
  return H_->pairing(ea, b);
}

OrbClass Chern::galois_dG(const IntVec& xi, const OrbClass& a) const {
  OrbClass out = a;
  for (std::size_t v = 0; v < H_->sectors(); ++v) {
    cplx ph = phase(stack::f_of_xi(H_->X(), H_->X().box[v], xi));
    for (std::size_t k = 0; k < H_->ring(v).dim(); ++k) out[H_->offset(v) + k] *= ph;
  }
  return out;
}

OrbClass Chern::galois_G(const IntVec& xi, const OrbClass& tau) const {
  OrbClass out = galois_dG(xi, tau);
  const auto& R = H_->ring(0);
  IntVec xp = H_->basis().to_p_coords(xi);
  for (std::size_t a = 0; a < R.nvars; ++a)
    for (const auto& [k, c] : R.var_mult[a][0]) out[H_->offset(0) + k] -= 2 * kPi * kI * Rat(c * Rat(xp[a])).get_d();
  return out;
}

double Chern::gamma_todd_identity_check(std::size_t v, std::size_t order) const {
  const auto& X = H_->X();
  const auto& s = X.box[v];
  const std::size_t m = X.m;
  const cplx tpi = 2 * kPi * kI;
  std::vector<OrbClass> L(m), Rt(m);
  Rat iota = 0;
  int nonzero = 0;
  for (std::size_t i = 0; i < m; ++i) {
    Rat f = frac_q(-X.pair(i, s.d));
    Rat a1 = (f == 0) ? Rat(1) : f;  // 1 - fbar
    auto g1 = special::to_double(special::gamma_series(a1, order, digits_));
    auto g2 = special::to_double(special::gamma_series(Rat(1) - f, order, digits_));
    OrbClass s1(order + 1), s2(order + 1);
    for (std::size_t k = 0; k <= order; ++k) {
      s1[k] = g1[k] * std::pow(1.0 / tpi, static_cast<int>(k));
      s2[k] = g2[k] * std::pow(-1.0 / tpi, static_cast<int>(k));
    }
    L[i].assign(order + 1, 0.0);
    for (std::size_t a = 0; a <= order; ++a)
      for (std::size_t b = 0; a + b <= order; ++b) L[i][a + b] += s1[a] * s2[b];
    auto td = *todd_factor<cplx>(f, order);
    auto eh = inv_factorials<cplx>(order, cplx(-0.5));
    Rt[i].assign(order + 1, 0.0);
    for (std::size_t a = 0; a <= order; ++a)
      for (std::size_t b = 0; a + b <= order; ++b) Rt[i][a + b] += td[a] * eh[b];
    if (f != 0) {
      cplx c = tpi * std::exp(-kPi * kI * f.get_d());
      for (auto& x : Rt[i]) x *= c;
      ++nonzero;
    }
    iota += f;
  }
  if (nonzero != static_cast<int>(X.n) - s.n_v)
    throw Error("InternalInconsistency", "twisted root count differs from the sector codimension");

  // formal series in m independent variables, total degree <= order
  double err = 0;
  std::vector<std::size_t> alpha(m, 0);
  std::function<void(std::size_t, std::size_t, cplx, cplx)> rec = [&](std::size_t i, std::size_t left, cplx l, cplx r) {
    if (i == m) {
      err = std::max(err, std::abs(l - r));
      return;
    }
    for (std::size_t a = 0; a <= left; ++a) rec(i + 1, left - a, l * L[i][a], r * Rt[i][a]);
  };
  rec(0, order, 1.0, 1.0);

  // restricted to the sector ring with delta_i = D-bar_i
  const auto& R = H_->ring(v);
  OrbClass lhs(R.dim(), 0.0), rho(R.dim(), 0.0);
  lhs[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto di = H_->dbar_local<cplx>(v, i);
    lhs = H_->mul_local(v, lhs, H_->series_local(v, L[i], di));
    for (std::size_t k = 0; k < di.size(); ++k) rho[k] += di[k];
  }
  if (order >= static_cast<std::size_t>(R.top)) {
    OrbClass rhs = H_->mul_local(v, H_->series_local(v, inv_factorials<cplx>(R.top, cplx(-0.5)), rho),
                                 H_->sector_part(todd_class(), v));
    cplx c = std::pow(tpi, nonzero) * std::exp(-kPi * kI * iota.get_d());
    for (std::size_t k = 0; k < R.dim(); ++k) err = std::max(err, std::abs(lhs[k] - c * rhs[k]));
  }
  return err;
}

// ---------------------------------------------------------------- skyscrapers

KClass Chern::point() const { return KClass::from_tch(H_->point_class<cplx>(), "O_pt"); }

std::vector<IntVec> Chern::aut_characters(Subset I) const {
  const auto& X = H_->X();
  IntMatrix M(X.r, X.r);  // columns D_i, i in I
  std::size_t col = 0;
  for (std::size_t i = 0; i < X.m; ++i)
    if (has(I, i)) {
      for (std::size_t c = 0; c < X.r; ++c) M(c, col) = X.data.D(i, c);
      ++col;
    }
  if (col != X.r) throw Error("InvalidArgument", "subset " + stack::subset_str(I) + " is not a maximal anticone");
  auto snf = lattice::smith_normal_form(M);
  std::vector<IntVec> out{IntVec()};
  for (std::size_t k = 0; k < X.r; ++k) {
    Int s = abs(snf.S(k, k));
    std::vector<IntVec> next;
    for (const auto& pre : out)
      for (Int t = 0; t < s; ++t) {
        IntVec e = pre;
        e.push_back(t);
        next.push_back(e);
      }
    out = next;
  }
  for (auto& kv : out) {
    IntVec x(X.r, Int(0));
    for (std::size_t a = 0; a < X.r; ++a)
      for (std::size_t b = 0; b < X.r; ++b) x[a] += snf.U(a, b) * kv[b];
    kv = x;
  }
  return out;
}

KClass Chern::fixed_point_skyscraper(Subset I, const IntVec& xi) const {
  const auto& X = H_->X();
  if (std::find(X.max_anticones.begin(), X.max_anticones.end(), I) == X.max_anticones.end())
    throw Error("InvalidArgument", "subset " + stack::subset_str(I) + " is not a maximal anticone");
  KClass out = KClass::line(xi);
  for (std::size_t j = 0; j < X.m; ++j) {
    if (has(I, j)) continue;
    IntVec mdj(X.r);
    for (std::size_t c = 0; c < X.r; ++c) mdj[c] = -X.data.D(j, c);
    out = tensor(out, KClass::structure_sheaf(X.r) - KClass::line(mdj));
  }
  out.provenance = "O_y" + stack::subset_str(I);
  return out;
}

template std::vector<cplx> Chern::line_tch_local<cplx>(std::size_t, const IntVec&) const;
template std::vector<Rat> Chern::line_tch_local<Rat>(std::size_t, const IntVec&) const;

}  // namespace tmir::chern
