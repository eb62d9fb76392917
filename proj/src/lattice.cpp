#include "torimirror/lattice.hpp"

#include <algorithm>

namespace tmir::lattice {

namespace {

// Operation-tracking reducer: keeps L*M*R = A with L, R unimodular and their inverses.
struct Reducer {
  IntMatrix A, L, Linv, R, Rinv;
  explicit Reducer(const IntMatrix& M)
      : A(M),
        L(IntMatrix::identity(M.rows)),
        Linv(IntMatrix::identity(M.rows)),
        R(IntMatrix::identity(M.cols)),
        Rinv(IntMatrix::identity(M.cols)) {}

  // row_i += k * row_j
  void row_add(std::size_t i, std::size_t j, const Int& k) {
    if (k == 0) return;
    for (std::size_t c = 0; c < A.cols; ++c) A(i, c) += k * A(j, c);
    for (std::size_t c = 0; c < L.cols; ++c) L(i, c) += k * L(j, c);
    for (std::size_t r = 0; r < Linv.rows; ++r) Linv(r, j) -= k * Linv(r, i);
  }
  void row_swap(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < A.cols; ++c) std::swap(A(i, c), A(j, c));
    for (std::size_t c = 0; c < L.cols; ++c) std::swap(L(i, c), L(j, c));
    for (std::size_t r = 0; r < Linv.rows; ++r) std::swap(Linv(r, i), Linv(r, j));
  }
  void row_neg(std::size_t i) {
    for (std::size_t c = 0; c < A.cols; ++c) A(i, c) = -A(i, c);
    for (std::size_t c = 0; c < L.cols; ++c) L(i, c) = -L(i, c);
    for (std::size_t r = 0; r < Linv.rows; ++r) Linv(r, i) = -Linv(r, i);
  }
  // col_j += k * col_i
  void col_add(std::size_t j, std::size_t i, const Int& k) {
    if (k == 0) return;
    for (std::size_t r = 0; r < A.rows; ++r) A(r, j) += k * A(r, i);
    for (std::size_t r = 0; r < R.rows; ++r) R(r, j) += k * R(r, i);
    for (std::size_t c = 0; c < Rinv.cols; ++c) Rinv(i, c) -= k * Rinv(j, c);
  }
  void col_swap(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < A.rows; ++r) std::swap(A(r, i), A(r, j));
    for (std::size_t r = 0; r < R.rows; ++r) std::swap(R(r, i), R(r, j));
    for (std::size_t c = 0; c < Rinv.cols; ++c) std::swap(Rinv(i, c), Rinv(j, c));
  }
};

Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

bool GroupElem::is_zero() const {
  for (const auto& x : free)
    if (x != 0) return false;
  for (const auto& x : tors)
    if (x != 0) return false;
  return true;
}

SmithDecomposition smith_normal_form(const IntMatrix& M) {
  Reducer red(M);
  IntMatrix& A = red.A;
  const std::size_t m = A.rows, r = A.cols, k = std::min(m, r);
  for (std::size_t t = 0; t < k; ++t) {
    auto place_min = [&](bool whole) {
      std::size_t bi = m, bj = r;
      Int best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < r; ++j) {
          if (!whole && i != t && j != t) continue;
          if (A(i, j) == 0) continue;
          Int v = abs(A(i, j));
          if (bi == m || v < best) best = v, bi = i, bj = j;
        }
      if (bi == m) return false;
      red.row_swap(t, bi);
      red.col_swap(t, bj);
      return true;
    };
    if (!place_min(true)) break;
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        red.row_add(i, t, -fdiv(A(i, t), A(t, t)));
        if (A(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < r; ++j) {
        red.col_add(j, t, -fdiv(A(t, j), A(t, t)));
        if (A(t, j) != 0) clean = false;
      }
      if (!clean) {
        place_min(false);
        continue;
      }
      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i)
        for (std::size_t j = t + 1; j < r; ++j)
          if (A(i, j) % A(t, t) != 0) {
            red.row_add(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (A(t, t) < 0) red.row_neg(t);
  }
  return SmithDecomposition{red.Linv, red.A, red.Rinv};
}

GroupElem FinAbGroup::represent(const IntVec& x) const {
  GroupElem g;
  g.free.assign(free_rank, Int(0));
  g.tors.assign(torsion.size(), Int(0));
  for (std::size_t i = 0; i < free_rank; ++i)
    for (std::size_t j = 0; j < ambient; ++j) g.free[i] += proj_free(i, j) * x[j];
  for (std::size_t i = 0; i < torsion.size(); ++i) {
    Int s = 0;
    for (std::size_t j = 0; j < ambient; ++j) s += proj_tors(i, j) * x[j];
    mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), torsion[i].get_mpz_t());
    g.tors[i] = s;
  }
  return g;
}

GroupElem FinAbGroup::basis_image(std::size_t i) const {
  IntVec e(ambient, Int(0));
  e[i] = 1;
  return represent(e);
}

Int FinAbGroup::torsion_order() const {
  Int o = 1;
  for (const auto& t : torsion) o *= t;
  return o;
}

FinAbGroup cokernel(const IntMatrix& M) {
  const std::size_t m = M.rows, r = M.cols;
  if (r > m) throw Error("RankDeficient", "more columns than rows");
  SmithDecomposition snf = smith_normal_form(M);
  auto Linv = inverse(to_rat(snf.U));
  FinAbGroup G;
  G.ambient = m;
  G.free_rank = m - r;
  std::vector<std::size_t> trows;
  for (std::size_t k = 0; k < r; ++k) {
    if (snf.S(k, k) == 0) throw Error("RankDeficient", "column " + std::to_string(k) + " dependent");
    if (snf.S(k, k) > 1) {
      G.torsion.push_back(snf.S(k, k));
      trows.push_back(k);
    }
  }
  G.proj_free = IntMatrix(m - r, m);
  G.proj_tors = IntMatrix(trows.size(), m);
  for (std::size_t i = 0; i < m - r; ++i)
    for (std::size_t j = 0; j < m; ++j) G.proj_free(i, j) = (*Linv)(r + i, j).get_num();
  for (std::size_t i = 0; i < trows.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) G.proj_tors(i, j) = (*Linv)(trows[i], j).get_num();
  return G;
}

// ---------------------------------------------------------------- rational LA

namespace {
// Row echelon form in place; returns pivot columns.
std::vector<std::size_t> echelon(RatMatrix& A) {
  std::vector<std::size_t> piv;
  std::size_t row = 0;
  for (std::size_t c = 0; c < A.cols && row < A.rows; ++c) {
    std::size_t p = row;
    while (p < A.rows && A(p, c) == 0) ++p;
    if (p == A.rows) continue;
    if (p != row)
      for (std::size_t j = 0; j < A.cols; ++j) std::swap(A(p, j), A(row, j));
    Rat inv = 1 / A(row, c);
    for (std::size_t j = 0; j < A.cols; ++j) A(row, j) *= inv;
    for (std::size_t i = 0; i < A.rows; ++i) {
      if (i == row || A(i, c) == 0) continue;
      Rat f = A(i, c);
      for (std::size_t j = 0; j < A.cols; ++j) A(i, j) -= f * A(row, j);
    }
    piv.push_back(c);
    ++row;
  }
  return piv;
}
}  // namespace

std::size_t rank(const RatMatrix& A) {
  RatMatrix B = A;
  return echelon(B).size();
}

std::optional<RatVec> solve_square(const RatMatrix& A, const RatVec& b) {
  const std::size_t n = A.rows;
  if (n == 0) return RatVec{};
  RatMatrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = A(i, j);
    aug(i, n) = b[i];
  }
  auto piv = echelon(aug);
  if (piv.size() < n || piv.back() >= n) return std::nullopt;
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

std::optional<RatMatrix> inverse(const RatMatrix& A) {
  const std::size_t n = A.rows;
  if (n == 0) return RatMatrix{};
  RatMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = A(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = echelon(aug);
  if (piv.size() < n || piv[n - 1] >= n) return std::nullopt;
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

Rat det(const RatMatrix& A0) {
  RatMatrix A = A0;
  const std::size_t n = A.rows;
  Rat d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && A(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(p, j), A(c, j));
      d = -d;
    }
    d *= A(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (A(i, c) == 0) continue;
      Rat f = A(i, c) / A(c, c);
      for (std::size_t j = c; j < n; ++j) A(i, j) -= f * A(c, j);
    }
  }
  return d;
}

Int det(const IntMatrix& A) { return det(to_rat(A)).get_num(); }

std::vector<RatVec> nullspace(const RatMatrix& A0) {
  RatMatrix A = A0;
  auto piv = echelon(A);
  std::vector<bool> is_piv(A.cols, false);
  for (auto c : piv) is_piv[c] = true;
  std::vector<RatVec> out;
  for (std::size_t f = 0; f < A.cols; ++f) {
    if (is_piv[f]) continue;
    RatVec x(A.cols, Rat(0));
    x[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = -A(i, f);
    out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------- simplex

namespace {

struct Tableau {
  RatMatrix T;  // p x (q+1), last column rhs
  std::vector<std::size_t> basis;
};

void pivot(Tableau& tb, std::size_t pr, std::size_t pc) {
  RatMatrix& T = tb.T;
  Rat inv = 1 / T(pr, pc);
  for (std::size_t j = 0; j < T.cols; ++j) T(pr, j) *= inv;
  for (std::size_t i = 0; i < T.rows; ++i) {
    if (i == pr || T(i, pc) == 0) continue;
    Rat f = T(i, pc);
    for (std::size_t j = 0; j < T.cols; ++j) T(i, j) -= f * T(pr, j);
  }
  tb.basis[pr] = pc;
}

// Maximize c.x over the tableau (columns < ncols usable). Bland's rule.
void run_simplex(Tableau& tb, const RatVec& c, std::size_t ncols) {
  RatMatrix& T = tb.T;
  const std::size_t rhs = T.cols - 1;
  for (;;) {
    std::size_t enter = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      Rat rc = c[j];
      for (std::size_t i = 0; i < T.rows; ++i) rc -= c[tb.basis[i]] * T(i, j);
      if (rc > 0) {
        enter = j;
        break;
      }
    }
    if (enter == ncols) return;
    std::size_t leave = T.rows;
    Rat best;
    for (std::size_t i = 0; i < T.rows; ++i) {
      if (T(i, enter) <= 0) continue;
      Rat ratio = T(i, rhs) / T(i, enter);
      if (leave == T.rows || ratio < best || (ratio == best && tb.basis[i] < tb.basis[leave]))
        best = ratio, leave = i;
    }
    if (leave == T.rows) throw Error("Unbounded", "linear program is unbounded");
    pivot(tb, leave, enter);
  }
}

}  // namespace

std::optional<LPResult> lp_maximize(const RatMatrix& A, const RatVec& b, const RatVec& c) {
  const std::size_t p = A.rows, q = A.cols;
  Tableau tb;
  tb.T = RatMatrix(p, q + p + 1);
  tb.basis.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    Rat s = b[i] < 0 ? Rat(-1) : Rat(1);
    for (std::size_t j = 0; j < q; ++j) tb.T(i, j) = s * A(i, j);
    tb.T(i, q + i) = 1;
    tb.T(i, q + p) = s * b[i];
    tb.basis[i] = q + i;
  }
  RatVec c1(q + p, Rat(0));
  for (std::size_t i = 0; i < p; ++i) c1[q + i] = -1;
  run_simplex(tb, c1, q + p);
  for (std::size_t i = 0; i < p; ++i)
    if (tb.basis[i] >= q && tb.T(i, q + p) != 0) return std::nullopt;
  // Drive artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < tb.T.rows;) {
    if (tb.basis[i] < q) {
      ++i;
      continue;
    }
    std::size_t col = q;
    for (std::size_t j = 0; j < q; ++j)
      if (tb.T(i, j) != 0) {
        col = j;
        break;
      }
    if (col < q) {
      pivot(tb, i, col);
      ++i;
    } else {
      RatMatrix T2(tb.T.rows - 1, tb.T.cols);
      for (std::size_t r = 0, rr = 0; r < tb.T.rows; ++r) {
        if (r == i) continue;
        for (std::size_t j = 0; j < tb.T.cols; ++j) T2(rr, j) = tb.T(r, j);
        ++rr;
      }
      tb.T = T2;
      tb.basis.erase(tb.basis.begin() + i);
    }
  }
  RatVec c2(q + p, Rat(0));
  for (std::size_t j = 0; j < q; ++j) c2[j] = c[j];
  run_simplex(tb, c2, q);
  LPResult res;
  res.x.assign(q, Rat(0));
  for (std::size_t i = 0; i < tb.T.rows; ++i) res.x[tb.basis[i]] = tb.T(i, q + p);
  res.value = 0;
  for (std::size_t j = 0; j < q; ++j) res.value += c[j] * res.x[j];
  return res;
}

std::optional<RatVec> lp_feasible(const RatMatrix& A, const RatVec& b) {
  auto r = lp_maximize(A, b, RatVec(A.cols, Rat(0)));
  if (!r) return std::nullopt;
  return r->x;
}

std::optional<RatVec> cone_contains(const RationalCone& cone, const RatVec& x, bool strict) {
  const std::size_t k = cone.gens.size(), d = cone.dim;
  if (x.size() != d) throw Error("DimensionMismatch", "cone_contains");
  if (k == 0) {
    for (const auto& v : x)
      if (v != 0) return std::nullopt;
    return RatVec{};
  }
  if (!strict) {
    RatMatrix A(d, k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < d; ++i) A(i, j) = cone.gens[j][i];
    return lp_feasible(A, x);
  }
  // variables: t, s_1..s_k, u ; coefficients c_j = t + s_j ; t + u = 1 ; maximize t
  RatMatrix A(d + 1, k + 2);
  RatVec b(d + 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      A(i, 0) += cone.gens[j][i];
      A(i, 1 + j) = cone.gens[j][i];
    }
    b[i] = x[i];
  }
  A(d, 0) = 1;
  A(d, k + 1) = 1;
  b[d] = 1;
  RatVec c(k + 2, Rat(0));
  c[0] = 1;
  auto r = lp_maximize(A, b, c);
  if (!r || r->value <= 0) return std::nullopt;
  RatVec coef(k);
  for (std::size_t j = 0; j < k; ++j) coef[j] = r->x[0] + r->x[1 + j];
  return coef;
}

}  // namespace tmir::lattice
