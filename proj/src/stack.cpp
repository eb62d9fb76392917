#include "torimirror/stack.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace tmir::stack {

using lattice::GroupElem;
using lattice::RationalCone;

std::string subset_str(Subset s) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < 32; ++i)
    if (has(s, i)) {
      if (!first) out += ",";
      out += std::to_string(i + 1);
      first = false;
    }
  return out + "}";
}

namespace {

RatMatrix rows_of(const IntMatrix& D, Subset s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < D.rows; ++i)
    if (has(s, i)) idx.push_back(i);
  RatMatrix A(idx.size(), D.cols);
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t j = 0; j < D.cols; ++j) A(k, j) = D(idx[k], j);
  return A;
}

RationalCone cone_of_rows(const IntMatrix& D, Subset s) {
  RationalCone c;
  c.dim = D.cols;
  for (std::size_t i = 0; i < D.rows; ++i)
    if (has(s, i)) {
      RatVec g(D.cols);
      for (std::size_t j = 0; j < D.cols; ++j) g[j] = D(i, j);
      c.gens.push_back(g);
    }
  return c;
}

std::string vec_str(const RatVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s + ")";
}

}  // namespace

Subset InertiaData::support_of(const RatVec& d) const {
  Subset s = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (is_int(pair(i, d))) s |= (1u << i);
  return s;
}

RatVec InertiaData::reduce(const RatVec& d) const {
  RatVec out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) out[k] = frac_q(d[k]);
  return out;
}

std::size_t InertiaData::sector_of(const RatVec& d) const {
  Subset s = support_of(d);
  if (!is_anticone(s)) throw Error("NotInK", "support " + subset_str(s) + " is not an anticone");
  auto it = box_lookup.find(reduce(d));
  if (it == box_lookup.end()) throw Error("NotInK", "no Box element for d=" + vec_str(d));
  return it->second;
}

GroupElem InertiaData::v_of(const RatVec& d) const {
  IntVec x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = ceil_q(pair(i, d));
  return N.represent(x);
}

bool InertiaData::in_cl_ctilde(const RatVec& x) const {
  for (const auto& inv : max_cone_inv) {
    for (std::size_t i = 0; i < inv.rows; ++i) {
      Rat c = 0;
      for (std::size_t j = 0; j < inv.cols; ++j) c += inv(i, j) * x[j];
      if (c < 0) return false;
    }
  }
  return true;
}

InertiaData validate(const StackInitialData& data) {
  InertiaData X;
  X.data = data;
  X.m = data.D.rows;
  X.r = data.r;
  if (data.D.cols != data.r || data.eta.size() != data.r)
    throw Error("SchemaError", "weights must be m x r and eta of length r");
  if (X.m > 20) throw Error("DeskScaleExceeded", "m > 20");
  if (X.m <= X.r) throw Error("Unsupported", "need m > r (positive-dimensional target)");
  X.n = X.m - X.r;

  // anticones
  const Subset nsub = 1u << X.m;
  X.anticone_flag.assign(nsub, 0);
  for (Subset s = 0; s < nsub; ++s)
    if (lattice::cone_contains(cone_of_rows(data.D, s), data.eta, true)) X.anticone_flag[s] = 1;
  for (Subset s = 0; s < nsub; ++s)
    if (X.anticone_flag[s]) X.anticones.push_back(s);
  std::stable_sort(X.anticones.begin(), X.anticones.end(), [](Subset a, Subset b) {
    return popcount(a) != popcount(b) ? popcount(a) < popcount(b) : a < b;
  });

  if (!X.is_anticone(X.full())) throw Error("ConditionAViolated", "full index set " + subset_str(X.full()) + " is not an anticone");
  for (Subset s : X.anticones)
    if (lattice::rank(rows_of(data.D, s)) != X.r)
      throw Error("ConditionBViolated", "anticone " + subset_str(s) + " does not span");
  {
    // (C): no c >= 0, sum c = 1, sum c_i D_i = 0
    RatMatrix A(X.r + 1, X.m);
    RatVec b(X.r + 1, Rat(0));
    for (std::size_t i = 0; i < X.m; ++i) {
      for (std::size_t j = 0; j < X.r; ++j) A(j, i) = data.D(i, j);
      A(X.r, i) = 1;
    }
    b[X.r] = 1;
    if (auto c = lattice::lp_feasible(A, b)) {
      Subset w = 0;
      for (std::size_t i = 0; i < X.m; ++i)
        if ((*c)[i] != 0) w |= 1u << i;
      throw Error("ConditionCViolated", "nonnegative relation supported on " + subset_str(w) + " c=" + vec_str(*c));
    }
  }

  X.N = lattice::cokernel(data.D);
  for (std::size_t i = 0; i < X.m; ++i) {
    X.b.push_back(X.N.basis_image(i));
    RatVec f(X.n);
    for (std::size_t k = 0; k < X.n; ++k) f[k] = X.b.back().free[k];
    X.b_free.push_back(f);
  }

  X.redundant.assign(X.m, false);
  for (std::size_t i = 0; i < X.m; ++i)
    X.redundant[i] = !X.is_anticone(X.full() & ~(1u << i));
  X.mprime = std::count(X.redundant.begin(), X.redundant.end(), false);

  // minimal anticones; simpliciality of every fan cone
  for (Subset s : X.anticones) {
    Subset comp = X.full() & ~s;
    RatMatrix B(popcount(comp), X.n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < X.m; ++i)
      if (has(comp, i)) {
        for (std::size_t j = 0; j < X.n; ++j) B(k, j) = X.b_free[i][j];
        ++k;
      }
    if (lattice::rank(B) != static_cast<std::size_t>(popcount(comp)))
      throw Error("FanNotSimplicial", "cone of anticone " + subset_str(s) + " has dependent rays");
    bool minimal = true;
    for (std::size_t i = 0; i < X.m && minimal; ++i)
      if (has(s, i) && X.is_anticone(s & ~(1u << i))) minimal = false;
    if (minimal) {
      if (popcount(s) != static_cast<int>(X.r))
        throw Error("FanIncomplete", "maximal cone for " + subset_str(s) + " is not full dimensional");
      X.max_anticones.push_back(s);
      X.max_cone_inv.push_back(*lattice::inverse(rows_of(data.D, s).transpose()));
    }
  }

  // completeness: every facet of a maximal cone is shared by exactly two maximal cones,
  // lying on opposite sides of the facet hyperplane
  for (Subset I : X.max_anticones) {
    Subset J = X.full() & ~I;
    for (std::size_t j = 0; j < X.m; ++j) {
      if (!has(J, j)) continue;
      Subset F = J & ~(1u << j);
      std::vector<std::size_t> others;
      for (Subset I2 : X.max_anticones) {
        Subset J2 = X.full() & ~I2;
        if ((J2 & F) == F && J2 != J) others.push_back(static_cast<std::size_t>(__builtin_ctz(J2 & ~F)));
      }
      if (others.size() != 1)
        throw Error("FanIncomplete", "facet " + subset_str(F) + " lies in " + std::to_string(others.size() + 1) + " maximal cones");
      RatMatrix Fm(popcount(F), X.n);
      std::size_t k = 0;
      for (std::size_t i = 0; i < X.m; ++i)
        if (has(F, i)) {
          for (std::size_t c = 0; c < X.n; ++c) Fm(k, c) = X.b_free[i][c];
          ++k;
        }
      RatVec h = X.n == 1 ? RatVec{Rat(1)} : lattice::nullspace(Fm).at(0);
      Rat s1 = dot(h, X.b_free[j]), s2 = dot(h, X.b_free[others[0]]);
      if (sgn(s1) * sgn(s2) >= 0)
        throw Error("FanIncomplete", "cones across facet " + subset_str(F) + " overlap");
    }
  }

  X.box = enumerate_box(X);
  for (const auto& bs : X.box) X.box_lookup[bs.d] = bs.index;
  return X;
}

std::vector<BoxSector> enumerate_box(const InertiaData& X) {
  std::map<RatVec, BoxSector> found;
  const Int ntor = X.N.torsion_order();
  for (Subset I : X.max_anticones) {
    IntMatrix DI(X.r, X.r);
    std::size_t k = 0;
    for (std::size_t i = 0; i < X.m; ++i)
      if (has(I, i)) {
        for (std::size_t j = 0; j < X.r; ++j) DI(k, j) = X.data.D(i, j);
        ++k;
      }
    // parallelepiped count cross-check: |det D_I| = |N_tor| * |det(b_J)|
    Subset J = X.full() & ~I;
    RatMatrix BJ(X.n, X.n);
    k = 0;
    for (std::size_t i = 0; i < X.m; ++i)
      if (has(J, i)) {
        for (std::size_t c = 0; c < X.n; ++c) BJ(k, c) = X.b_free[i][c];
        ++k;
      }
    Int detD = abs(lattice::det(DI));
    Rat detB = abs(lattice::det(BJ));
    if (Rat(detD) != Rat(ntor) * detB)
      throw Error("InternalInconsistency", "parallelepiped count mismatch at " + subset_str(I));

    auto snf = lattice::smith_normal_form(DI);
    auto Vinv = *lattice::inverse(to_rat(snf.V));
    IntVec s(X.r);
    for (std::size_t a = 0; a < X.r; ++a) s[a] = snf.S(a, a);
    IntVec kk(X.r, Int(0));
    std::function<void(std::size_t)> rec = [&](std::size_t a) {
      if (a == X.r) {
        RatVec w(X.r);
        for (std::size_t c = 0; c < X.r; ++c) w[c] = ratio(kk[c], s[c]);
        RatVec d(X.r, Rat(0));
        for (std::size_t i2 = 0; i2 < X.r; ++i2)
          for (std::size_t c = 0; c < X.r; ++c) d[i2] += Vinv(i2, c) * w[c];
        d = X.reduce(d);
        if (found.count(d)) return;
        BoxSector bs;
        bs.d = d;
        bs.support = X.support_of(d);
        bs.age = 0;
        for (std::size_t i2 = 0; i2 < X.m; ++i2) bs.age += frac_q(-X.pair(i2, d));
        bs.n_v = popcount(bs.support) - static_cast<int>(X.r);
        bs.v = X.v_of(d);
        found[d] = bs;
        return;
      }
      for (Int t = 0; t < s[a]; ++t) {
        kk[a] = t;
        rec(a + 1);
      }
    };
    rec(0);
  }
  std::vector<BoxSector> out;
  for (auto& kv : found) out.push_back(kv.second);
  std::stable_sort(out.begin(), out.end(), [](const BoxSector& a, const BoxSector& b) {
    return a.age != b.age ? a.age < b.age : a.d < b.d;
  });
  std::map<RatVec, std::size_t> idx;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i, idx[out[i].d] = i;
  for (auto& bs : out) {
    RatVec neg(bs.d.size());
    for (std::size_t c = 0; c < neg.size(); ++c) neg[c] = -bs.d[c];
    bs.inv = idx.at(X.reduce(neg));
  }
  // distinct cosets must give distinct v
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].v == out[j].v) throw Error("InternalInconsistency", "Box map not injective");
  return out;
}

AgeResult age_of_d(const InertiaData& X, const RatVec& d) {
  std::size_t s = X.sector_of(d);
  Rat age = 0;
  for (std::size_t i = 0; i < X.m; ++i) age += frac_q(-X.pair(i, d));
  return AgeResult{s, X.v_of(d), age};
}

// ---------------------------------------------------------------- nef basis

RatVec NefBasis::p_pairings(const RatVec& d) const {
  RatVec out(P.rows, Rat(0));
  for (std::size_t a = 0; a < P.rows; ++a)
    for (std::size_t j = 0; j < P.cols; ++j) out[a] += Rat(P(a, j)) * d[j];
  return out;
}

Rat NefBasis::degree(const RatVec& d) const {
  Rat s = 0;
  for (const auto& x : p_pairings(d)) s += x;
  return s;
}

IntVec NefBasis::to_p_coords(const IntVec& xi) const {
  IntVec out(P.rows, Int(0));
  for (std::size_t a = 0; a < P.rows; ++a) {
    Rat s = 0;
    for (std::size_t j = 0; j < P.rows; ++j) s += Rat(xi[j]) * Pinv(j, a);
    out[a] = s.get_num();
  }
  return out;
}

IntVec NefBasis::from_p_coords(const IntVec& xp) const {
  IntVec out(P.cols, Int(0));
  for (std::size_t a = 0; a < P.rows; ++a)
    for (std::size_t j = 0; j < P.cols; ++j) out[j] += xp[a] * P(a, j);
  return out;
}

namespace {

void finish_basis(const InertiaData& X, NefBasis& B) {
  B.Pinv = *lattice::inverse(to_rat(B.P));
  RatMatrix mmq = to_rat(X.data.D) * B.Pinv;
  B.mm = IntMatrix(X.m, X.r);
  for (std::size_t k = 0; k < mmq.a.size(); ++k) B.mm.a[k] = mmq.a[k].get_num();
  B.rho.assign(X.r, Int(0));
  for (std::size_t i = 0; i < X.m; ++i)
    for (std::size_t a = 0; a < X.r; ++a) B.rho[a] += B.mm(i, a);
  B.rho_nonneg = std::all_of(B.rho.begin(), B.rho.end(), [](const Int& x) { return x >= 0; });
  for (std::size_t j = 0; j < X.m; ++j) {
    if (!X.redundant[j]) continue;
    bool done = false;
    for (Subset I : X.max_anticones) {
      Subset J = X.full() & ~I;
      RationalCone c;
      c.dim = X.n;
      std::vector<std::size_t> jidx;
      for (std::size_t i = 0; i < X.m; ++i)
        if (has(J, i)) c.gens.push_back(X.b_free[i]), jidx.push_back(i);
      auto coef = lattice::cone_contains(c, X.b_free[j], false);
      if (!coef) continue;
      RatMatrix DI = rows_of(X.data.D, I);
      RatVec rhs(X.r, Rat(0));
      std::size_t k = 0;
      for (std::size_t i = 0; i < X.m; ++i)
        if (has(I, i)) rhs[k++] = (i == j) ? 1 : 0;
      RatVec dv = *lattice::solve_square(DI, rhs);
      RatVec sl(X.m, Rat(0));
      for (std::size_t i = 0; i < X.m; ++i)
        if (!has(I, i)) sl[i] = -X.pair(i, dv);
      for (std::size_t t = 0; t < jidx.size(); ++t)
        if (sl[jidx[t]] != (*coef)[t]) throw Error("InternalInconsistency", "splitting slopes disagree");
      B.Dvee[j] = dv;
      B.slopes[j] = sl;
      B.Ij[j] = I;
      done = true;
      break;
    }
    if (!done) throw Error("InternalInconsistency", "extra ray " + std::to_string(j + 1) + " not in any cone");
  }
}

std::string check_basis(const InertiaData& X, const NefBasis& B) {
  if (B.P.rows != X.r || B.P.cols != X.r) return "shape";
  Int d = lattice::det(B.P);
  if (d != 1 && d != -1) return "not unimodular (det " + d.get_str() + ")";
  RationalCone extra;
  extra.dim = X.r;
  for (std::size_t j = 0; j < X.m; ++j)
    if (X.redundant[j]) {
      RatVec g(X.r);
      for (std::size_t c = 0; c < X.r; ++c) g[c] = X.data.D(j, c);
      extra.gens.push_back(g);
    }
  for (std::size_t a = 0; a < X.r; ++a) {
    RatVec p(X.r);
    for (std::size_t c = 0; c < X.r; ++c) p[c] = B.P(a, c);
    if (!X.in_cl_ctilde(p)) return "p_" + std::to_string(a + 1) + " not in cl(C~)";
    if (a >= B.rprime && !lattice::cone_contains(extra, p, false))
      return "p_" + std::to_string(a + 1) + " not in the cone of extra D_j";
  }
  return "";
}

}  // namespace

NefBasis select_nef_basis(const InertiaData& X, const std::optional<IntMatrix>& user, bool weak_fano_mode,
                          int height_bound) {
  const std::size_t r = X.r;
  const std::size_t nextra = X.m - X.mprime;
  if (nextra > r) throw Error("BasisNotFound", "more extra rays than rank");
  NefBasis B;
  B.rprime = r - nextra;
  B.weak_fano_mode = weak_fano_mode;
  RatVec rho_hat(r, Rat(0));
  for (std::size_t i = 0; i < X.m; ++i)
    for (std::size_t c = 0; c < r; ++c) rho_hat[c] += X.data.D(i, c);
  if (weak_fano_mode && !X.in_cl_ctilde(rho_hat))
    throw Error("NotWeakFano", "rho-hat is outside cl(C~)");

  if (user) {
    B.P = *user;
    std::string why = check_basis(X, B);
    if (!why.empty()) throw Error("UserBasisInvalid", why);
    finish_basis(X, B);
    return B;
  }

  RationalCone extra;
  extra.dim = r;
  for (std::size_t j = 0; j < X.m; ++j)
    if (X.redundant[j]) {
      RatVec g(r);
      for (std::size_t c = 0; c < r; ++c) g[c] = X.data.D(j, c);
      extra.gens.push_back(g);
    }

  auto height = [](const IntVec& v) {
    Int h = 0;
    for (const auto& x : v) h = std::max(h, Int(abs(x)));
    return h;
  };
  // extremal rays of cl(C~) first: active inequality rows of rank r-1
  auto extremal = [&](const IntVec& v) {
    RatVec q(r);
    for (std::size_t c = 0; c < r; ++c) q[c] = v[c];
    std::vector<RatVec> active;
    for (const auto& inv : X.max_cone_inv)
      for (std::size_t i = 0; i < inv.rows; ++i) {
        Rat s = 0;
        for (std::size_t c = 0; c < r; ++c) s += inv(i, c) * q[c];
        if (s == 0) active.push_back(inv.row(i));
      }
    RatMatrix A(active.size(), r);
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t c = 0; c < r; ++c) A(i, c) = active[i][c];
    return lattice::rank(A) + 1 == r;
  };
  auto order = [&](const IntVec& a, const IntVec& b) {
    bool ea = extremal(a), eb = extremal(b);
    if (ea != eb) return ea;
    Int ha = height(a), hb = height(b);
    return ha != hb ? ha < hb : a > b;
  };

  for (int pass = 0; pass < 2; ++pass) {
    bool need_rho = weak_fano_mode && pass == 0;
    if (pass == 1 && !weak_fano_mode) break;
    for (int h = 1; h <= height_bound; ++h) {
      std::vector<IntVec> main, ext;
      IntVec v(r, Int(-h));
      for (;;) {
        if (height(v) > 0) {
          RatVec q(r);
          for (std::size_t c = 0; c < r; ++c) q[c] = v[c];
          if (X.in_cl_ctilde(q)) {
            main.push_back(v);
            if (nextra > 0 && lattice::cone_contains(extra, q, false)) ext.push_back(v);
          }
        }
        std::size_t c = 0;
        while (c < r && v[c] == h) v[c++] = -h;
        if (c == r) break;
        v[c] += 1;
      }
      std::sort(main.begin(), main.end(), order);
      std::sort(ext.begin(), ext.end(), order);
      // choose rprime from main, nextra from ext (index-increasing combinations)
      std::vector<std::size_t> im, ie;
      std::optional<NefBasis> hit;
      std::function<bool(std::size_t, std::size_t)> pick_ext;
      std::function<bool(std::size_t, std::size_t)> pick_main = [&](std::size_t start, std::size_t left) -> bool {
        if (left == 0) return pick_ext(0, nextra);
        for (std::size_t k = start; k < main.size(); ++k) {
          im.push_back(k);
          if (pick_main(k + 1, left - 1)) return true;
          im.pop_back();
        }
        return false;
      };
      pick_ext = [&](std::size_t start, std::size_t left) -> bool {
        if (left == 0) {
          NefBasis cand = B;
          cand.P = IntMatrix(r, r);
          std::size_t row = 0;
          for (auto k : im) {
            for (std::size_t c = 0; c < r; ++c) cand.P(row, c) = main[k][c];
            ++row;
          }
          for (auto k : ie) {
            for (std::size_t c = 0; c < r; ++c) cand.P(row, c) = ext[k][c];
            ++row;
          }
          Int d = lattice::det(cand.P);
          if (d != 1 && d != -1) return false;
          if (!check_basis(X, cand).empty()) return false;
          finish_basis(X, cand);
          if (need_rho && !cand.rho_nonneg) return false;
          hit = cand;
          return true;
        }
        for (std::size_t k = start; k < ext.size(); ++k) {
          ie.push_back(k);
          if (pick_ext(k + 1, left - 1)) return true;
          ie.pop_back();
        }
        return false;
      };
      if (pick_main(0, B.rprime)) return *hit;
    }
  }
  throw Error("BasisNotFound", "no unimodular nef basis within height " + std::to_string(height_bound));
}

WeakFanoReport weak_fano_check(const InertiaData& X, const NefBasis& B) {
  WeakFanoReport rep;
  RatVec rho_hat(X.r, Rat(0));
  for (std::size_t i = 0; i < X.m; ++i)
    for (std::size_t c = 0; c < X.r; ++c) rho_hat[c] += X.data.D(i, c);
  rep.rho_hat_in_cl = X.in_cl_ctilde(rho_hat);
  for (const auto& [j, sl] : B.slopes) {
    Rat age = 0;
    for (const auto& c : sl) age += c;
    rep.extra_ages.push_back({j, age});
    if (age > 1) rep.ages_ok = false;
  }
  return rep;
}

Rat f_of_xi(const InertiaData&, const BoxSector& v, const IntVec& xi) {
  Rat s = 0;
  for (std::size_t c = 0; c < xi.size(); ++c) s += Rat(xi[c]) * v.d[c];
  return frac_q(-s);
}

Int e0(const InertiaData& X) {
  Int l = 1;
  for (const auto& bs : X.box)
    for (const auto& x : bs.d) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

std::vector<RatVec> enumerate_keff(const InertiaData& X, const NefBasis& B, const Rat& cap) {
  const Int e = e0(X);
  const Int total = floor_q(cap * e);
  std::vector<RatVec> out;
  IntVec k(X.r, Int(0));
  std::function<void(std::size_t, Int)> rec = [&](std::size_t a, Int left) {
    if (a == X.r) {
      RatVec delta(X.r), d(X.r, Rat(0));
      for (std::size_t c = 0; c < X.r; ++c) delta[c] = ratio(k[c], e);
      for (std::size_t i = 0; i < X.r; ++i)
        for (std::size_t c = 0; c < X.r; ++c) d[i] += B.Pinv(i, c) * delta[c];
      Subset s = 0;
      for (std::size_t i = 0; i < X.m; ++i) {
        Rat p = X.pair(i, d);
        if (is_int(p) && p >= 0) s |= 1u << i;
      }
      if (X.is_anticone(s)) out.push_back(d);
      return;
    }
    for (Int t = 0; t <= left; ++t) {
      k[a] = t;
      rec(a + 1, left - t);
    }
    k[a] = 0;
  };
  if (total >= 0) rec(0, total);
  std::stable_sort(out.begin(), out.end(), [&](const RatVec& a, const RatVec& b) {
    Rat da = B.degree(a), db = B.degree(b);
    return da != db ? da < db : a < b;
  });
  return out;
}

}  // namespace tmir::stack
