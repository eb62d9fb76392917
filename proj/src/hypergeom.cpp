#include "torimirror/hypergeom.hpp"

#include <algorithm>
#include <functional>
#include <numbers>

namespace tmir::hypergeom {

using stack::has;
using stack::Subset;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);

bool is_zero(const RatVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; });
}

void prune(Laurent& a) {
  for (auto it = a.begin(); it != a.end();) it = is_zero(it->second) ? a.erase(it) : std::next(it);
}

std::string laurent_str(const Laurent& a) {
  std::string s;
  for (const auto& [k, v] : a) {
    s += " z^" + std::to_string(k) + ":[";
    for (std::size_t j = 0; j < v.size(); ++j) s += (j ? "," : "") + to_str(v[j]);
    s += "]";
  }
  return s;
}

std::string vec_str(const RatVec& d) {
  std::string s = "(";
  for (std::size_t j = 0; j < d.size(); ++j) s += (j ? "," : "") + to_str(d[j]);
  return s + ")";
}

}  // namespace

const QTerm* QSeries::find(const RatVec& d) const {
  for (const auto& t : terms)
    if (t.d == d) return &t;
  return nullptr;
}

Hypergeom::Hypergeom(const chern::Chern& C, Options opt) : C_(&C), opt_(opt) {}

Laurent Hypergeom::lmul(std::size_t v, const Laurent& a, const Laurent& b) const {
  Laurent out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) {
      auto p = H().mul_local(v, x, y);
      auto& slot = out[i + j];
      if (slot.empty()) slot.assign(p.size(), Rat(0));
      for (std::size_t k = 0; k < p.size(); ++k) slot[k] += p[k];
    }
  prune(out);
  return out;
}

Laurent Hypergeom::box_coefficient(const RatVec& d) const {
  const std::size_t v = X().sector_of(d);
  const auto& R = H().ring(v);
  Laurent c;
  c[0] = RatVec(R.dim(), Rat(0));
  c[0][0] = 1;
  for (std::size_t i = 0; i < X().m; ++i) {
    Rat k = X().pair(i, d);
    Int ck = ceil_q(k);
    auto dbar = H().dbar_local<Rat>(v, i);
    if (ck < 0) {
      for (Int nu = ck; nu < 0; ++nu) {
        Laurent f;
        f[0] = dbar;
        f[1] = RatVec(R.dim(), Rat(0));
        f[1][0] = k - Rat(nu);
        prune(f);
        c = lmul(v, c, f);
      }
    } else {
      for (Int nu = 0; nu < ck; ++nu) {
        // 1/(Dbar + a z) = sum_j (-Dbar)^j / a^{j+1} z^{-j-1}
        Rat a = k - Rat(nu);
        Laurent f;
        RatVec pw(R.dim(), Rat(0));
        pw[0] = 1;
        Rat ainv = 1 / a, s = ainv;
        for (int j = 0; j <= R.top; ++j) {
          RatVec t = pw;
          for (auto& x : t) x *= s;
          f[-j - 1] = t;
          pw = H().mul_local(v, pw, dbar);
          for (auto& x : pw) x = -x;
          s *= ainv;
        }
        prune(f);
        c = lmul(v, c, f);
      }
    }
    if (c.empty()) break;
  }
  return c;
}

Rat Hypergeom::homogeneity_defect(const QTerm& t, int zpow, std::size_t k) const {
  Rat rho_d = 0;
  for (std::size_t i = 0; i < X().m; ++i) rho_d += X().pair(i, t.d);
  return Rat(H().ring(t.sector).degree[k]) + X().box[t.sector].age + Rat(zpow) + rho_d;
}

QSeries Hypergeom::i_function(const Rat& cap) const {
  if (!stack::weak_fano_check(X(), B()).rho_hat_in_cl)
    throw Error("NotWeakFano", "rho-hat is not in the closure of the extended ample cone");
  auto ds = stack::enumerate_keff(X(), B(), cap);
  QSeries S;
  S.cap = cap;
  S.certified = cap;
  S.terms.resize(ds.size());
  std::vector<std::string> errs(ds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < ds.size(); ++t) {
    QTerm q;
    q.d = ds[t];
    q.sector = X().sector_of(ds[t]);
    q.c = box_coefficient(ds[t]);
    for (const auto& [zp, v] : q.c)
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] != 0 && homogeneity_defect(q, zp, k) != 0) errs[t] = "d=" + vec_str(q.d) + " z^" + std::to_string(zp);
    S.terms[t] = std::move(q);
  }
  for (const auto& e : errs)
    if (!e.empty()) throw Error("InternalInconsistency", "I-function is not homogeneous at " + e);
  return S;
}

bool Hypergeom::verify_dropped_terms(const Rat& cap) const {
  const Int e = stack::e0(X());
  const Int lo = -e, hi = floor_q(cap * e);
  std::vector<Int> k(X().r);
  bool ok = true;
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (!ok) return;
    if (a == X().r) {
      RatVec d(X().r, Rat(0));
      Rat tot = 0;
      for (std::size_t c = 0; c < X().r; ++c) tot += ratio(k[c], e);
      if (tot > cap) return;
      for (std::size_t i = 0; i < X().r; ++i)
        for (std::size_t c = 0; c < X().r; ++c) d[i] += B().Pinv(i, c) * ratio(k[c], e);
      Subset s = 0, se = 0;
      for (std::size_t i = 0; i < X().m; ++i) {
        Rat p = X().pair(i, d);
        if (is_int(p)) {
          s |= 1u << i;
          if (p >= 0) se |= 1u << i;
        }
      }
      if (!X().is_anticone(s) || X().is_anticone(se)) return;  // not in K, or in K_eff
      if (!box_coefficient(d).empty()) ok = false;
      return;
    }
    for (Int t = lo; t <= hi; ++t) {
      k[a] = t;
      rec(a + 1);
    }
  };
  rec(0);
  return ok;
}

RatVec Hypergeom::frak_D(std::size_t j, std::size_t* sector) const {
  const RatVec& dv = B().Dvee.at(j);
  std::size_t v = X().sector_of(dv);
  const auto& R = H().ring(v);
  RatVec c(R.dim(), Rat(0));
  c[0] = 1;
  Subset I = B().Ij.at(j);
  const RatVec& sl = B().slopes.at(j);
  for (std::size_t i = 0; i < X().m; ++i) {
    if (has(I, i)) continue;
    Int f = floor_q(sl[i]);
    for (Int t = 0; t < f; ++t) c = H().mul_local(v, c, H().dbar_local<Rat>(v, i));
  }
  if (sector) *sector = v;
  return c;
}

MirrorMap Hypergeom::mirror_map(const Rat& cap) const {
  auto I = i_function(cap);
  MirrorMap M;
  M.cap = cap;
  for (const auto& t : I.terms) {
    bool zero_d = is_zero(t.d);
    for (const auto& [zp, v] : t.c) {
      if (zero_d) {
        RatVec one(v.size(), Rat(0));
        one[0] = 1;
        if (zp != 0 || v != one) throw Error("InternalInconsistency", "d=0 coefficient of I is not 1");
        continue;
      }
      if (zp >= 0) throw Error("UnexpectedPositivePowers", "d=" + vec_str(t.d) + " has z^" + std::to_string(zp));
      if (zp != -1) continue;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] != 0 && H().ring(t.sector).degree[k] + X().box[t.sector].age > 1)
          throw Error("InternalInconsistency", "mirror map leaves H^{<=2}_orb at d=" + vec_str(t.d));
      MirrorMapTerm m{t.d, t.sector, v, "hot", 0};
      for (const auto& [j, dv] : B().Dvee)
        if (dv == t.d) {
          m.kind = "extra";
          m.j = j;
        }
      M.terms.push_back(m);
    }
  }
  return M;
}

Laurent Hypergeom::operator_factors(std::size_t v, const RatVec& delta, const std::vector<long>& counts,
                                    const Laurent& c) const {
  const auto& R = H().ring(v);
  Laurent out = c;
  for (std::size_t i = 0; i < X().m && !out.empty(); ++i) {
    if (counts[i] == 0) continue;
    Rat k = X().pair(i, delta);
    auto dbar = H().dbar_local<Rat>(v, i);
    for (long nu = 0; nu < counts[i]; ++nu) {
      Laurent f;
      f[0] = dbar;
      f[1] = RatVec(R.dim(), Rat(0));
      f[1][0] = k - Rat(nu);
      prune(f);
      out = lmul(v, out, f);
    }
  }
  return out;
}

QSeries Hypergeom::gkz_apply(const IntVec& d, const QSeries& S) const {
  RatVec dq(d.begin(), d.end());
  std::vector<long> neg(X().m, 0), pos(X().m, 0);
  for (std::size_t i = 0; i < X().m; ++i) {
    Rat k = X().pair(i, dq);
    if (!is_int(k)) throw Error("InvalidArgument", "operator degree is not in L");
    long kk = k.get_num().get_si();
    if (kk < 0) neg[i] = -kk;
    if (kk > 0) pos[i] = kk;
  }
  const Rat dd = B().degree(dq);
  QSeries out;
  out.cap = S.cap;
  out.certified = std::min(S.certified, Rat(S.certified + dd));
  std::map<RatVec, QTerm> acc;
  auto add = [&](const RatVec& at, std::size_t v, const Laurent& c, int sign) {
    if (B().degree(at) > out.certified) return;
    auto& slot = acc[at];
    slot.d = at;
    slot.sector = v;
    for (const auto& [zp, x] : c) {
      auto& s = slot.c[zp];
      if (s.empty()) s.assign(x.size(), Rat(0));
      for (std::size_t k = 0; k < x.size(); ++k) s[k] += sign * x[k];
    }
  };
  std::vector<std::pair<Laurent, Laurent>> parts(S.terms.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < S.terms.size(); ++t) {
    const auto& q = S.terms[t];
    parts[t] = {operator_factors(q.sector, q.d, neg, q.c), operator_factors(q.sector, q.d, pos, q.c)};
  }
  for (std::size_t t = 0; t < S.terms.size(); ++t) {
    const auto& q = S.terms[t];
    RatVec shifted = q.d;
    for (std::size_t c = 0; c < shifted.size(); ++c) shifted[c] += dq[c];
    add(shifted, q.sector, parts[t].first, 1);
    add(q.d, q.sector, parts[t].second, -1);
  }
  for (auto& [at, term] : acc) {
    prune(term.c);
    out.terms.push_back(term);
  }
  std::stable_sort(out.terms.begin(), out.terms.end(), [&](const QTerm& a, const QTerm& b) {
    Rat x = B().degree(a.d), y = B().degree(b.d);
    return x != y ? x < y : a.d < b.d;
  });
  return out;
}

std::vector<IntVec> Hypergeom::gkz_generators() const {
  const std::size_t r = X().r, m = X().m;
  std::vector<IntVec> gens;
  for (std::size_t a = 0; a < r; ++a) {
    IntVec g(r);
    for (std::size_t i = 0; i < r; ++i) {
      Rat x = B().Pinv(i, a);
      if (!is_int(x)) throw Error("InternalInconsistency", "dual basis is not integral");
      g[i] = x.get_num();
    }
    gens.push_back(g);
  }
  // D (u - w) - s = 1, u, w, s >= 0
  RatMatrix A(m, 2 * r + m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < r; ++c) {
      A(i, c) = Rat(X().data.D(i, c));
      A(i, r + c) = -Rat(X().data.D(i, c));
    }
    A(i, 2 * r + i) = -1;
  }
  auto x = lattice::lp_feasible(A, RatVec(m, Rat(1)));
  if (!x) throw Error("InternalInconsistency", "no d with <D_i,d> > 0 for all i");
  Int l = 1;
  RatVec d(r);
  for (std::size_t c = 0; c < r; ++c) {
    d[c] = (*x)[c] - (*x)[r + c];
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d[c].get_den_mpz_t());
  }
  IntVec g(r);
  for (std::size_t c = 0; c < r; ++c) g[c] = Rat(d[c] * Rat(l)).get_num();
  gens.push_back(g);
  return gens;
}

std::vector<GKZReport> Hypergeom::gkz_annihilation_check(const std::vector<IntVec>& gens, const Rat& cap) const {
  auto I = i_function(cap);
  std::vector<GKZReport> out;
  for (const auto& g : gens) {
    auto R = gkz_apply(g, I);
    GKZReport rep{g, R.certified, true, ""};
    for (const auto& t : R.terms)
      if (!t.c.empty()) {
        rep.zero = false;
        rep.first_nonzero = "q^" + vec_str(t.d) + laurent_str(t.c);
        break;
      }
    if (!rep.zero) {
      std::string ds;
      for (const auto& x : g) ds += (ds.empty() ? "" : ",") + to_str(x);
      throw Error("AnnihilationFailure", "P_(" + ds + ") I has nonzero coefficient " + rep.first_nonzero);
    }
    out.push_back(rep);
  }
  return out;
}

std::vector<AsymptoticsReport> Hypergeom::derivative_asymptotics_check() const {
  auto gens = gkz_generators();
  const IntVec& dp = gens.back();
  std::vector<AsymptoticsReport> out;
  for (const auto& s : X().box) {
    RatVec delta = s.d;
    for (int t = 0;; ++t) {
      bool ok = true;
      for (std::size_t i = 0; i < X().m; ++i)
        if (X().pair(i, delta) <= 0) ok = false;
      if (ok) break;
      for (std::size_t c = 0; c < delta.size(); ++c) delta[c] += Rat(dp[c]);
    }
    std::vector<long> counts(X().m);
    for (std::size_t i = 0; i < X().m; ++i) counts[i] = ceil_q(X().pair(i, delta)).get_si();
    auto I = i_function(B().degree(delta) + 1);
    AsymptoticsReport rep{s.index, delta, false, true};
    for (const auto& t : I.terms) {
      auto c = operator_factors(t.sector, t.d, counts, t.c);
      RatVec diff = t.d;
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= delta[k];
      if (is_zero(diff)) {
        RatVec one(H().ring(t.sector).dim(), Rat(0));
        one[0] = 1;
        rep.leading_ok = t.sector == s.index && c.size() == 1 && c.count(0) && c.at(0) == one;
      }
      auto pp = B().p_pairings(diff);
      if (std::any_of(pp.begin(), pp.end(), [](const Rat& x) { return x < 0; }) && !c.empty())
        rep.no_negative_terms = false;
    }
    out.push_back(rep);
  }
  return out;
}

chern::OrbClass Hypergeom::pbar_sum(std::size_t v, const std::vector<cplx>& coef) const {
  const auto& R = H().ring(v);
  chern::OrbClass x(R.dim(), 0.0);
  for (std::size_t a = 0; a < R.nvars; ++a)
    for (const auto& [k, c] : R.var_mult[a][0]) x[k] += coef[a] * c.get_d();
  return x;
}

namespace {
std::vector<cplx> exp_coeffs(int top) {
  std::vector<cplx> c(top + 1);
  c[0] = 1;
  for (int k = 1; k <= top; ++k) c[k] = c[k - 1] / double(k);
  return c;
}
}  // namespace

chern::OrbClass Hypergeom::i_eval(const QSeries& I, const std::vector<cplx>& logq, cplx z) const {
  std::vector<chern::OrbClass> parts(I.terms.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < I.terms.size(); ++t) {
    const auto& q = I.terms[t];
    auto pp = B().p_pairings(q.d);
    cplx e = 0;
    for (std::size_t a = 0; a < pp.size(); ++a) e += pp[a].get_d() * logq[a];
    cplx w = std::exp(e);
    chern::OrbClass loc(H().ring(q.sector).dim(), 0.0);
    for (const auto& [zp, v] : q.c)
      for (std::size_t k = 0; k < v.size(); ++k) loc[k] += w * std::pow(z, zp) * v[k].get_d();
    parts[t] = loc;
  }
  auto out = H().zero<cplx>();
  for (std::size_t t = 0; t < I.terms.size(); ++t)
    for (std::size_t k = 0; k < parts[t].size(); ++k) out[H().offset(I.terms[t].sector) + k] += parts[t][k];
  std::vector<cplx> coef(logq.size());
  for (std::size_t a = 0; a < coef.size(); ++a) coef[a] = logq[a] / z;
  for (std::size_t v = 0; v < H().sectors(); ++v) {
    auto pre = H().series_local(v, exp_coeffs(H().ring(v).top), pbar_sum(v, coef));
    H().set_sector(out, v, H().mul_local(v, pre, H().sector_part(out, v)));
  }
  return out;
}

HValue Hypergeom::h_function_eval(const std::vector<double>& q, cplx z, const Rat& cap) const {
  std::vector<cplx> logq;
  for (double x : q) {
    if (!(x > 0)) throw Error("BranchUnspecified", "q must be positive real unless log q is given");
    logq.push_back(std::log(x));
  }
  if (z == 0.0) throw Error("InvalidArgument", "z = 0");
  return h_function_eval_log(logq, std::log(z), cap);
}

HValue Hypergeom::h_function_eval_log(const std::vector<cplx>& logq, cplx logz, const Rat& cap) const {
  if (!stack::weak_fano_check(X(), B()).rho_hat_in_cl)
    throw Error("NotWeakFano", "rho-hat is not in the closure of the extended ample cone");
  for (const auto& l : logq)
    if (std::exp(l.real()) > opt_.q_domain)
      throw Error("OutsideSmallQDomain", "|q_a| = " + std::to_string(std::exp(l.real())) + " exceeds " +
                                             std::to_string(opt_.q_domain));
  const std::size_t r = X().r;
  std::vector<cplx> logx(r);
  for (std::size_t a = 0; a < r; ++a) logx[a] = logq[a] - B().rho[a].get_d() * logz;
  std::vector<cplx> lx2(r);
  for (std::size_t a = 0; a < r; ++a) lx2[a] = logx[a] / (2 * kPi * kI);
  auto ds = stack::enumerate_keff(X(), B(), cap);
  const double sign = (X().n % 2) ? -1.0 : 1.0;
  const int digits = C_->digits();
  std::vector<chern::OrbClass> parts(ds.size());
  std::vector<std::size_t> where(ds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < ds.size(); ++t) {
    const auto& d = ds[t];
    std::size_t w = X().box[X().sector_of(d)].inv;
    const auto& R = H().ring(w);
    auto pp = B().p_pairings(d);
    cplx e = 0;
    for (std::size_t a = 0; a < r; ++a) e += pp[a].get_d() * logx[a];
    auto loc = H().series_local(w, exp_coeffs(R.top), pbar_sum(w, lx2));
    for (auto& x : loc) x *= sign * std::exp(e);
    for (std::size_t i = 0; i < X().m; ++i) {
      auto g = special::to_double(special::rgamma_series(Rat(1) + X().pair(i, d), R.top, digits));
      std::vector<cplx> c(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) c[k] = g[k] * std::pow(1.0 / (2 * kPi * kI), static_cast<int>(k));
      loc = H().mul_local(w, loc, H().series_local(w, c, H().dbar_local<cplx>(w, i)));
    }
    parts[t] = loc;
    where[t] = w;
  }
  HValue hv;
  hv.value = H().zero<cplx>();
  hv.terms = ds.size();
  std::vector<double> shells;
  Rat cur = -1;
  for (std::size_t t = 0; t < ds.size(); ++t) {
    Rat deg = B().degree(ds[t]);
    if (deg != cur) {
      shells.push_back(0);
      cur = deg;
    }
    for (std::size_t k = 0; k < parts[t].size(); ++k) {
      hv.value[H().offset(where[t]) + k] += parts[t][k];
      shells.back() += std::abs(parts[t][k]);
    }
  }
  double total = 0;
  for (const auto& x : hv.value) total += std::abs(x);
  if (shells.size() >= 2 && shells[shells.size() - 2] > 0) {
    double ratio_ = shells.back() / shells[shells.size() - 2];
    hv.tail_estimate = ratio_ < 1 ? shells.back() * ratio_ / (1 - ratio_) : INFINITY;
  } else {
    hv.tail_estimate = shells.empty() ? 0 : shells.back();
  }
  hv.truncation_warning = hv.tail_estimate > opt_.tail_tolerance * std::max(1.0, total);
  return hv;
}

cplx Hypergeom::central_charge(const chern::KClass& V, const std::vector<double>& q, cplx z, const Rat& cap,
                               HValue* hout) const {
  std::vector<cplx> logq;
  for (double x : q) {
    if (!(x > 0)) throw Error("BranchUnspecified", "q must be positive real");
    logq.push_back(std::log(x));
  }
  // counterclockwise rotation: log(e^{pi i} z) = log z + pi i
  auto hv = h_function_eval_log(logq, std::log(z) + kPi * kI, cap);
  if (hout) *hout = hv;
  auto td = C_->todd_class();
  auto tv = C_->tch(C_->dual(V));
  return H().integrate(H().mul(hv.value, H().mul(tv, td)));
}

std::vector<std::pair<RatVec, Rat>> Hypergeom::point_restriction(const Rat& cap) const {
  std::vector<std::pair<RatVec, Rat>> out;
  for (const auto& d : stack::enumerate_keff(X(), B(), cap)) {
    if (X().sector_of(d) != 0) continue;
    Rat c = 1;
    for (std::size_t i = 0; i < X().m && c != 0; ++i) {
      Rat k = X().pair(i, d);
      if (k < 0) c = 0;
      for (Int j = 2; j <= k.get_num(); ++j) c /= Rat(j);
    }
    if (c != 0) out.push_back({d, c});
  }
  return out;
}

MonodromyReport Hypergeom::galois_monodromy_check(const IntVec& xi, const Rat& cap) const {
  MonodromyReport rep;
  auto I = i_function(cap);
  for (const auto& t : I.terms) {
    Rat xd = 0;
    for (std::size_t c = 0; c < xi.size(); ++c) xd += Rat(xi[c]) * t.d[c];
    cplx a = std::polar(1.0, -2 * kPi * frac_q(xd).get_d());
    cplx b = chern::Chern::phase(stack::f_of_xi(X(), X().box[t.sector], xi));
    rep.max_coeff_error = std::max(rep.max_coeff_error, std::abs(a - b));
  }
  IntVec xp = B().to_p_coords(xi);
  std::vector<cplx> logq(X().r), rot(X().r);
  for (std::size_t a = 0; a < X().r; ++a) {
    logq[a] = std::log(0.05 / (1.0 + a));
    rot[a] = logq[a] - 2 * kPi * kI * xp[a].get_d();
  }
  const cplx z(1.3, 0.2);
  auto lhs = i_eval(I, rot, z);
  auto rhs = i_eval(I, logq, z);
  std::vector<cplx> coef(X().r);
  for (std::size_t a = 0; a < X().r; ++a) coef[a] = -2 * kPi * kI * xp[a].get_d() / z;
  for (std::size_t v = 0; v < H().sectors(); ++v) {
    auto g = H().series_local(v, exp_coeffs(H().ring(v).top), pbar_sum(v, coef));
    auto loc = H().mul_local(v, g, H().sector_part(rhs, v));
    cplx ph = chern::Chern::phase(stack::f_of_xi(X(), X().box[v], xi));
    for (auto& x : loc) x *= ph;
    H().set_sector(rhs, v, loc);
  }
  for (std::size_t k = 0; k < lhs.size(); ++k) rep.max_value_error = std::max(rep.max_value_error, std::abs(lhs[k] - rhs[k]));
  return rep;
}

}  // namespace tmir::hypergeom
