#include "torimirror/cohomology.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace tmir::cohomology {

using stack::has;
using stack::Subset;

namespace {

using Poly = std::map<Exponent, Rat>;

std::vector<Exponent> monomials(std::size_t nvars, int k) {
  std::vector<Exponent> out;
  Exponent e(nvars, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t a, int left) {
    if (a + 1 == nvars) {
      e[a] = left;
      out.push_back(e);
      return;
    }
    for (int t = left; t >= 0; --t) {
      e[a] = t;
      rec(a + 1, left - t);
    }
  };
  if (nvars == 0) {
    if (k == 0) out.push_back(e);
    return out;
  }
  rec(0, k);
  return out;  // descending lex
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exponent e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

Poly linear(const RatVec& coef) {
  Poly p;
  for (std::size_t a = 0; a < coef.size(); ++a)
    if (coef[a] != 0) {
      Exponent e(coef.size(), 0);
      e[a] = 1;
      p[e] = coef[a];
    }
  return p;
}

// reduced row echelon form over columns in the given order
void rref(std::vector<RatVec>& rows, std::vector<std::size_t>& piv, std::size_t ncols) {
  std::size_t r = 0;
  piv.clear();
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    Rat inv = 1 / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat f = rows[i][c];
      for (std::size_t j = 0; j < ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    piv.push_back(c);
    ++r;
  }
  rows.resize(r);
}

}  // namespace

RatVec SectorRing::normal_form(const Exponent& e) const {
  RatVec out(dim(), Rat(0));
  int k = 0;
  for (int x : e) k += x;
  if (k > top) return out;
  const auto& ms = monos[k];
  RatVec v(ms.size(), Rat(0));
  auto it = std::find(ms.begin(), ms.end(), e);
  v[it - ms.begin()] = 1;
  for (std::size_t t = 0; t < rref_rows[k].size(); ++t) {
    std::size_t c = rref_piv[k][t];
    if (v[c] == 0) continue;
    Rat f = v[c];
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * rref_rows[k][t][j];
  }
  for (std::size_t j = 0; j < ms.size(); ++j) {
    if (v[j] == 0) continue;
    auto bit = std::find(basis.begin() + deg_begin[k], basis.begin() + deg_begin[k + 1], ms[j]);
    out[bit - basis.begin()] = v[j];
  }
  return out;
}

SectorRing build_sector_ring(const stack::InertiaData& X, const stack::NefBasis& B, Subset S) {
  SectorRing R;
  R.support = S;
  R.nvars = B.rprime;
  R.top = stack::popcount(S) - static_cast<int>(X.r);
  std::vector<RatVec> lin(X.m, RatVec(R.nvars, Rat(0)));
  for (std::size_t i = 0; i < X.m; ++i)
    for (std::size_t a = 0; a < R.nvars; ++a) lin[i][a] = B.mm(i, a);
  for (std::size_t j = 0; j < X.m; ++j)
    if (X.redundant[j])
      for (const auto& x : lin[j])
        if (x != 0) throw Error("InternalInconsistency", "extra divisor class is nonzero");

  // minimal generators of J_v
  std::vector<Subset> gens;
  Subset cand = 0;
  for (std::size_t i = 0; i < X.m; ++i)
    if (has(S, i) && !X.redundant[i]) cand |= 1u << i;
  for (Subset I = cand;; I = (I - 1) & cand) {
    if (I != 0 && !X.is_anticone(S & ~I)) {
      bool minimal = true;
      for (std::size_t i = 0; i < X.m && minimal; ++i)
        if (has(I, i) && !X.is_anticone(S & ~(I & ~(1u << i)))) minimal = false;
      if (minimal) gens.push_back(I);
    }
    if (I == 0) break;
  }
  std::vector<Poly> gpoly;
  std::vector<int> gdeg;
  for (Subset I : gens) {
    Poly p;
    p[Exponent(R.nvars, 0)] = 1;
    for (std::size_t i = 0; i < X.m; ++i)
      if (has(I, i)) p = poly_mul(p, linear(lin[i]));
    gpoly.push_back(p);
    gdeg.push_back(stack::popcount(I));
  }

  R.deg_begin.push_back(0);
  for (int k = 0; k <= R.top + 1; ++k) {
    auto ms = monomials(R.nvars, k);
    std::map<Exponent, std::size_t> col;
    for (std::size_t j = 0; j < ms.size(); ++j) col[ms[j]] = j;
    std::vector<RatVec> rows;
    for (std::size_t g = 0; g < gpoly.size(); ++g) {
      if (gdeg[g] > k) continue;
      for (const auto& mono : monomials(R.nvars, k - gdeg[g])) {
        Poly mp;
        mp[mono] = 1;
        Poly prod = poly_mul(gpoly[g], mp);
        RatVec row(ms.size(), Rat(0));
        for (const auto& [e, c] : prod) row[col.at(e)] = c;
        rows.push_back(row);
      }
    }
    std::vector<std::size_t> piv;
    rref(rows, piv, ms.size());
    int hk = static_cast<int>(ms.size() - piv.size());
    R.hilbert.push_back(hk);
    if (k <= R.top) {
      std::vector<bool> isp(ms.size(), false);
      for (auto c : piv) isp[c] = true;
      for (std::size_t j = 0; j < ms.size(); ++j)
        if (!isp[j]) {
          R.basis.push_back(ms[j]);
          R.degree.push_back(k);
        }
      R.deg_begin.push_back(R.basis.size());
      R.monos.push_back(ms);
      R.rref_rows.push_back(rows);
      R.rref_piv.push_back(piv);
    }
  }
  if (R.hilbert[R.top] != 1 || R.hilbert[R.top + 1] != 0)
    throw Error("InternalInconsistency", "sector ring " + stack::subset_str(S) + " has wrong top degree");
  for (int k = 0; k <= R.top; ++k)
    if (R.hilbert[k] != R.hilbert[R.top - k])
      throw Error("InternalInconsistency", "Poincare symmetry fails on " + stack::subset_str(S));
  R.hilbert.pop_back();

  const std::size_t d = R.dim();
  R.mult.resize(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Exponent e(R.nvars);
      for (std::size_t a = 0; a < R.nvars; ++a) e[a] = R.basis[i][a] + R.basis[j][a];
      auto nf = R.normal_form(e);
      for (std::size_t k = 0; k < d; ++k)
        if (nf[k] != 0) R.mult[i * d + j].push_back({k, nf[k]});
    }
  R.var_mult.assign(R.nvars, std::vector<Sparse>(d));
  for (std::size_t a = 0; a < R.nvars; ++a)
    for (std::size_t i = 0; i < d; ++i) {
      Exponent e = R.basis[i];
      e[a] += 1;
      auto nf = R.normal_form(e);
      for (std::size_t k = 0; k < d; ++k)
        if (nf[k] != 0) R.var_mult[a][i].push_back({k, nf[k]});
    }
  R.dbar.assign(X.m, RatVec(d, Rat(0)));
  for (std::size_t i = 0; i < X.m; ++i)
    for (std::size_t a = 0; a < R.nvars; ++a) {
      if (lin[i][a] == 0) continue;
      Exponent e(R.nvars, 0);
      e[a] = 1;
      auto nf = R.normal_form(e);
      for (std::size_t k = 0; k < d; ++k) R.dbar[i][k] += lin[i][a] * nf[k];
    }

  // integration: square-free monomial of each maximal cone of X_v integrates to 1/|det D_I|
  bool have = false;
  for (Subset I : X.max_anticones) {
    if ((I & S) != I) continue;
    Poly mu;
    mu[Exponent(R.nvars, 0)] = 1;
    for (std::size_t j = 0; j < X.m; ++j)
      if (has(S, j) && !has(I, j)) mu = poly_mul(mu, linear(lin[j]));
    RatVec nf(d, Rat(0));
    for (const auto& [e, c] : mu) {
      auto t = R.normal_form(e);
      for (std::size_t k = 0; k < d; ++k) nf[k] += c * t[k];
    }
    Rat lambda = nf[d - 1];
    if (lambda == 0) throw Error("InternalInconsistency", "cone monomial vanishes on " + stack::subset_str(S));
    IntMatrix DI(X.r, X.r);
    std::size_t row = 0;
    for (std::size_t i = 0; i < X.m; ++i)
      if (has(I, i)) {
        for (std::size_t c = 0; c < X.r; ++c) DI(row, c) = X.data.D(i, c);
        ++row;
      }
    Rat val = 1 / (lambda * Rat(abs(lattice::det(DI))));
    if (have && val != R.top_integral)
      throw Error("InternalInconsistency", "integration normalization differs between cones on " + stack::subset_str(S));
    R.top_integral = val;
    have = true;
  }
  if (!have) throw Error("InternalInconsistency", "sector without maximal cone");
  return R;
}

Cohomology::Cohomology(const stack::InertiaData& X, const stack::NefBasis& B) : X_(&X), B_(&B) {
  std::map<Subset, std::shared_ptr<SectorRing>> cache;
  for (const auto& v : X.box) {
    auto it = cache.find(v.support);
    if (it == cache.end())
      it = cache.emplace(v.support, std::make_shared<SectorRing>(build_sector_ring(X, B, v.support))).first;
    rings_.push_back(it->second);
    offset_.push_back(total_);
    for (std::size_t k = 0; k < it->second->dim(); ++k) sector_of_.push_back(v.index);
    total_ += it->second->dim();
  }
}

int Cohomology::hdeg(std::size_t k) const {
  std::size_t v = sector_of_[k];
  return ring(v).degree[k - offset_[v]];
}

Rat Cohomology::orbdeg_half(std::size_t k) const { return Rat(hdeg(k)) + X_->box[sector_of_[k]].age; }

std::string Cohomology::label(std::size_t k) const {
  std::size_t v = sector_of_[k];
  const auto& e = ring(v).basis[k - offset_[v]];
  std::string s;
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (e[a] == 0) continue;
    if (!s.empty()) s += "*";
    s += "p" + std::to_string(a + 1);
    if (e[a] > 1) s += "^" + std::to_string(e[a]);
  }
  if (s.empty()) s = "1";
  return s + "@v" + std::to_string(v);
}

RatMatrix Cohomology::pairing_matrix() const {
  RatMatrix G(total_, total_);
  for (std::size_t i = 0; i < total_; ++i) {
    auto ei = zero<Rat>();
    ei[i] = 1;
    for (std::size_t j = 0; j < total_; ++j) {
      auto ej = zero<Rat>();
      ej[j] = 1;
      G(i, j) = pairing(ei, ej);
    }
  }
  return G;
}

}  // namespace tmir::cohomology
