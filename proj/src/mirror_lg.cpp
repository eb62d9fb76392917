#include "torimirror/mirror_lg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <numbers>
#include <random>
#include <set>

namespace tmir::mirror_lg {

using stack::has;
using stack::Subset;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
}  // namespace

// ---------------------------------------------------------------- model

Int LGModel::ntors() const {
  Int t = 1;
  for (const auto& x : torsion) t *= x;
  return t;
}

std::vector<IntVec> LGModel::components() const {
  std::vector<IntVec> out{IntVec()};
  for (const auto& t : torsion) {
    std::vector<IntVec> next;
    for (const auto& c : out)
      for (Int k = 0; k < t; ++k) {
        auto e = c;
        e.push_back(k);
        next.push_back(e);
      }
    out = next;
  }
  return out;
}

std::vector<cplx> LGModel::coefficients(const std::vector<cplx>& logq, std::size_t component) const {
  auto comps = components();
  const auto& chi = comps.at(component);
  std::vector<cplx> c(m);
  for (std::size_t i = 0; i < m; ++i) {
    cplx e = 0;
    for (std::size_t a = 0; a < r; ++a) e += ell(i, a).get_d() * logq[a];
    Rat ph = 0;
    for (std::size_t k = 0; k < torsion.size(); ++k) ph += ratio(chi[k] * btors(i, k), torsion[k]);
    c[i] = std::exp(e) * std::polar(1.0, 2 * kPi * frac_q(ph).get_d());
  }
  return c;
}

cplx LGModel::W(const std::vector<cplx>& coeff, const std::vector<cplx>& logy) const {
  cplx s = 0;
  for (std::size_t i = 0; i < m; ++i) {
    cplx e = 0;
    for (std::size_t j = 0; j < n; ++j) e += bfree(i, j).get_d() * logy[j];
    s += coeff[i] * std::exp(e);
  }
  return s;
}

std::vector<cplx> LGModel::grad_log(const std::vector<cplx>& coeff, const std::vector<cplx>& logy) const {
  std::vector<cplx> g(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    cplx e = 0;
    for (std::size_t j = 0; j < n; ++j) e += bfree(i, j).get_d() * logy[j];
    cplx t = coeff[i] * std::exp(e);
    for (std::size_t j = 0; j < n; ++j) g[j] += bfree(i, j).get_d() * t;
  }
  return g;
}

std::string LGModel::describe() const {
  std::string s;
  for (std::size_t i = 0; i < m; ++i) {
    if (i) s += " + ";
    std::string t;
    for (std::size_t a = 0; a < r; ++a)
      if (ell(i, a) != 0) t += (t.empty() ? "" : "*") + ("q" + std::to_string(a + 1)) + (ell(i, a) == 1 ? "" : "^" + to_str(ell(i, a)));
    for (std::size_t j = 0; j < n; ++j)
      if (bfree(i, j) != 0)
        t += (t.empty() ? "" : "*") + ("y" + std::to_string(j + 1)) + (bfree(i, j) == 1 ? "" : "^" + to_str(bfree(i, j)));
    if (!torsion.empty()) {
      std::string tt;
      for (std::size_t k = 0; k < torsion.size(); ++k) tt += (k ? "," : "") + to_str(btors(i, k));
      t += (t.empty() ? "" : "*") + ("chi(" + tt + ")");
    }
    s += t.empty() ? "1" : t;
  }
  return s;
}

LGModel build_lg(const stack::InertiaData& X, const stack::NefBasis& B) {
  LGModel M;
  M.m = X.m;
  M.r = X.r;
  M.n = X.n;
  M.mm = B.mm;
  std::size_t best = 0;
  for (std::size_t k = 1; k < X.max_anticones.size(); ++k)
    if (X.max_anticones[k] > X.max_anticones[best]) best = k;
  M.support = X.max_anticones[best];
  const RatMatrix& inv = X.max_cone_inv[best];  // (D_I^T)^{-1}
  M.ell = RatMatrix(X.m, X.r);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < X.m; ++i)
    if (has(M.support, i)) idx.push_back(i);
  for (std::size_t a = 0; a < X.r; ++a)
    for (std::size_t t = 0; t < idx.size(); ++t) {
      Rat s = 0;
      for (std::size_t c = 0; c < X.r; ++c) s += inv(t, c) * Rat(B.P(a, c));
      M.ell(idx[t], a) = s;
    }
  for (std::size_t a = 0; a < X.r; ++a)
    for (std::size_t c = 0; c < X.r; ++c) {
      Rat s = 0;
      for (std::size_t i = 0; i < X.m; ++i) s += Rat(X.data.D(i, c)) * M.ell(i, a);
      if (s != Rat(B.P(a, c))) throw Error("InternalInconsistency", "splitting does not reproduce p");
    }

  M.torsion = X.N.torsion;
  M.bfree = IntMatrix(X.m, X.n);
  M.btors = IntMatrix(X.m, M.torsion.size());
  for (std::size_t i = 0; i < X.m; ++i) {
    for (std::size_t j = 0; j < X.n; ++j) M.bfree(i, j) = X.b[i].free[j];
    for (std::size_t k = 0; k < M.torsion.size(); ++k) M.btors(i, k) = X.b[i].tors[k];
  }
  auto snf = lattice::smith_normal_form(X.data.D);
  M.free_pre = IntMatrix(X.m, X.n);
  M.tors_pre = IntMatrix(X.m, M.torsion.size());
  std::size_t tk = 0;
  for (std::size_t k = 0; k < X.r; ++k)
    if (abs(snf.S(k, k)) > 1) {
      for (std::size_t i = 0; i < X.m; ++i) M.tors_pre(i, tk) = snf.U(i, k);
      ++tk;
    }
  for (std::size_t j = 0; j < X.n; ++j)
    for (std::size_t i = 0; i < X.m; ++i) M.free_pre(i, j) = snf.U(i, X.r + j);
  // the preimages must map to the generators
  for (std::size_t j = 0; j < X.n; ++j) {
    auto g = X.N.represent(M.free_pre.col(j));
    for (std::size_t c = 0; c < X.n; ++c)
      if (g.free[c] != (c == j ? 1 : 0)) throw Error("InternalInconsistency", "free generator preimage");
    for (const auto& t : g.tors)
      if (t != 0) throw Error("InternalInconsistency", "free generator preimage has torsion");
  }
  for (std::size_t k = 0; k < M.torsion.size(); ++k) {
    auto g = X.N.represent(M.tors_pre.col(k));
    for (const auto& f : g.free)
      if (f != 0) throw Error("InternalInconsistency", "torsion generator preimage");
    for (std::size_t c = 0; c < M.torsion.size(); ++c)
      if (g.tors[c] != (c == k ? 1 : 0)) throw Error("InternalInconsistency", "torsion generator preimage");
  }
  return M;
}

// ---------------------------------------------------------------- Batyrev

namespace {
std::vector<cplx> w_of(const LGModel& M, const std::vector<cplx>& P) {
  std::vector<cplx> w(M.m, 0.0);
  for (std::size_t i = 0; i < M.m; ++i)
    for (std::size_t b = 0; b < M.r; ++b) w[i] += M.mm(i, b).get_d() * P[b];
  return w;
}
}  // namespace

std::vector<cplx> batyrev_q(const LGModel& M, const std::vector<cplx>& P) {
  auto w = w_of(M, P);
  std::vector<cplx> q(M.r, 1.0);
  for (std::size_t a = 0; a < M.r; ++a)
    for (std::size_t i = 0; i < M.m; ++i) q[a] *= std::pow(w[i], static_cast<int>(M.mm(i, a).get_si()));
  return q;
}

std::vector<std::string> batyrev_relations(const LGModel& M) {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < M.r; ++a) {
    std::string s = "q" + std::to_string(a + 1) + " =";
    for (std::size_t i = 0; i < M.m; ++i) {
      long e = M.mm(i, a).get_si();
      if (e == 0) continue;
      std::string w;
      for (std::size_t b = 0; b < M.r; ++b) {
        long c = M.mm(i, b).get_si();
        if (c == 0) continue;
        if (!w.empty()) w += c > 0 ? "+" : "-";
        else if (c < 0) w += "-";
        if (std::labs(c) != 1) w += std::to_string(std::labs(c));
        w += "P" + std::to_string(b + 1);
      }
      s += " (" + w + ")" + (e == 1 ? "" : "^" + std::to_string(e));
    }
    out.push_back(s);
  }
  return out;
}

double batyrev_residual(const LGModel& M, const IntVec& d, const std::vector<cplx>& logq, const std::vector<cplx>& w) {
  cplx lq = 0, lhs = 1, rhs = 1;
  // d given by its p-pairings <p_a,d>; k_i = <D_i,d> = sum_a mm(i,a) <p_a,d>
  std::vector<long> k(M.m, 0);
  for (std::size_t i = 0; i < M.m; ++i)
    for (std::size_t a = 0; a < M.r; ++a) k[i] += M.mm(i, a).get_si() * d[a].get_si();
  for (std::size_t a = 0; a < M.r; ++a) lq += d[a].get_d() * logq[a];
  lhs = std::exp(lq);
  for (std::size_t i = 0; i < M.m; ++i) {
    if (k[i] < 0) lhs *= std::pow(w[i], static_cast<int>(-k[i]));
    if (k[i] > 0) rhs *= std::pow(w[i], static_cast<int>(k[i]));
  }
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

// ---------------------------------------------------------------- critical points

namespace {

struct System {
  const LGModel& M;
  std::vector<cplx> q;
  std::vector<int> deg;

  // F_a = prod_{m>0} w^m - q_a prod_{m<0} w^{-m}
  void eval(const VecC& x, VecC& F, MatC& J) const {
    const std::size_t r = M.r, m = M.m;
    std::vector<cplx> P(x.data(), x.data() + r);
    auto w = w_of(M, P);
    F.resize(r);
    J.resize(r, r);
    for (std::size_t a = 0; a < r; ++a) {
      cplx pos = 1, neg = 1;
      std::vector<cplx> dpos(r, 0.0), dneg(r, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        long e = M.mm(i, a).get_si();
        if (e == 0) continue;
        long ae = std::labs(e);
        cplx& prod = e > 0 ? pos : neg;
        auto& dprod = e > 0 ? dpos : dneg;
        cplx wp = std::pow(w[i], static_cast<int>(ae));
        cplx dw = double(ae) * std::pow(w[i], static_cast<int>(ae - 1));
        for (std::size_t b = 0; b < r; ++b) dprod[b] = dprod[b] * wp + prod * dw * M.mm(i, b).get_d();
        prod *= wp;
      }
      F(a) = pos - q[a] * neg;
      for (std::size_t b = 0; b < r; ++b) J(a, b) = dpos[b] - q[a] * dneg[b];
    }
  }
  double scale(const VecC& x, std::size_t a) const {
    std::vector<cplx> P(x.data(), x.data() + M.r);
    auto w = w_of(M, P);
    cplx pos = 1, neg = 1;
    for (std::size_t i = 0; i < M.m; ++i) {
      long e = M.mm(i, a).get_si();
      if (e > 0) pos *= std::pow(w[i], static_cast<int>(e));
      if (e < 0) neg *= std::pow(w[i], static_cast<int>(-e));
    }
    return std::abs(pos) + std::abs(q[a] * neg);
  }
};

std::optional<VecC> track(const System& S, const VecC& start, cplx gamma) {
  const std::size_t r = S.M.r;
  auto H = [&](const VecC& x, double t, VecC& h, MatC& hx, VecC& ht) {
    VecC F, G(r);
    MatC JF, JG = MatC::Zero(r, r);
    S.eval(x, F, JF);
    for (std::size_t a = 0; a < r; ++a) {
      G(a) = std::pow(x(a), S.deg[a]) - 1.0;
      JG(a, a) = double(S.deg[a]) * std::pow(x(a), S.deg[a] - 1);
    }
    h = (1 - t) * gamma * G + t * F;
    hx = (1 - t) * gamma * JG + t * JF;
    ht = F - gamma * G;
  };
  VecC x = start;
  double t = 0, dt = 0.02;
  VecC h, ht;
  MatC hx;
  while (t < 1) {
    dt = std::min(dt, 1 - t);
    H(x, t, h, hx, ht);
    VecC dx = hx.partialPivLu().solve(-ht);
    VecC y = x + dt * dx;
    double t1 = t + dt;
    bool ok = false;
    for (int it = 0; it < 4; ++it) {
      H(y, t1, h, hx, ht);
      VecC corr = hx.partialPivLu().solve(h);
      y -= corr;
      if (!y.allFinite()) break;
      if (corr.norm() < 1e-11 * (1 + y.norm())) {
        ok = true;
        break;
      }
    }
    if (ok) {
      x = y;
      t = t1;
      dt = std::min(dt * 1.6, 0.1);
    } else {
      dt /= 2;
      if (dt < 1e-13) return std::nullopt;
    }
    if (x.norm() > 1e8) return std::nullopt;
  }
  // polish on the target system
  VecC F;
  MatC J;
  for (int it = 0; it < 30; ++it) {
    S.eval(x, F, J);
    VecC c = J.partialPivLu().solve(F);
    if (!c.allFinite()) return std::nullopt;
    x -= c;
    if (c.norm() < 1e-15 * (1 + x.norm())) break;
  }
  return x;
}

}  // namespace

CriticalSet jacobi_critical_points(const LGModel& M, const std::vector<cplx>& logq, Int expected, const SolverOptions& opt) {
  const std::size_t r = M.r;
  if (!opt.override_domain)
    for (const auto& l : logq)
      if (std::exp(l.real()) > opt.q_domain)
        throw Error("OutsideSmallQDomain", "|q| = " + std::to_string(std::exp(l.real())) + " exceeds " + std::to_string(opt.q_domain));
  System S{M, {}, {}};
  for (const auto& l : logq) S.q.push_back(std::exp(l));
  for (std::size_t a = 0; a < r; ++a) {
    long pos = 0, neg = 0;
    for (std::size_t i = 0; i < M.m; ++i) {
      long e = M.mm(i, a).get_si();
      (e > 0 ? pos : neg) += std::labs(e);
    }
    S.deg.push_back(static_cast<int>(std::max(pos, neg)));
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  const cplx gamma = std::polar(1.0, U(rng));

  // start solutions: roots of unity
  std::vector<VecC> starts{VecC(r)};
  for (std::size_t a = 0; a < r; ++a) {
    std::vector<VecC> next;
    for (const auto& s : starts)
      for (int k = 0; k < S.deg[a]; ++k) {
        VecC e = s;
        e(a) = std::polar(1.0, 2 * kPi * k / S.deg[a]);
        next.push_back(e);
      }
    starts = next;
  }
  std::vector<std::optional<VecC>> ends(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < starts.size(); ++k) ends[k] = track(S, starts[k], gamma);

  CriticalSet CS;
  CS.paths = starts.size();
  CS.expected_per_component = expected.get_ui();
  auto comps = M.components();
  CS.per_component.assign(comps.size(), 0);
  std::vector<VecC> found;
  for (const auto& e : ends) {
    if (!e) continue;
    const VecC& x = *e;
    std::vector<cplx> P(x.data(), x.data() + r);
    auto w = w_of(M, P);
    double wmax = 0;
    for (const auto& v : w) wmax = std::max(wmax, std::abs(v));
    bool zero_w = std::any_of(w.begin(), w.end(), [&](const cplx& v) { return std::abs(v) < 1e-7 * wmax; });
    if (zero_w) continue;
    VecC F;
    MatC J;
    S.eval(x, F, J);
    bool good = true;
    for (std::size_t a = 0; a < r; ++a)
      if (std::abs(F(a)) > 1e-9 * S.scale(x, a)) good = false;
    if (!good) continue;
    bool dup = false;
    for (const auto& f : found)
      if ((f - x).norm() < 1e-8 * (1 + x.norm())) dup = true;
    if (dup) continue;
    found.push_back(x);

    CritPoint cp;
    cp.P = P;
    cp.w = w;
    // phi(b_i) = w_i / q^{ell_i}
    std::vector<cplx> lphi(M.m);
    for (std::size_t i = 0; i < M.m; ++i) {
      cplx e = 0;
      for (std::size_t a = 0; a < r; ++a) e += M.ell(i, a).get_d() * logq[a];
      lphi[i] = std::log(w[i]) - e;
    }
    std::size_t comp = 0;
    for (std::size_t k = 0; k < M.torsion.size(); ++k) {
      cplx s = 0;
      for (std::size_t i = 0; i < M.m; ++i) s += M.tors_pre(i, k).get_d() * lphi[i];
      double t = M.torsion[k].get_d();
      long c = std::lround(s.imag() / (2 * kPi) * t);
      c = ((c % (long)t) + (long)t) % (long)t;
      comp = comp * static_cast<std::size_t>(t) + static_cast<std::size_t>(c);
    }
    cp.component = comp;
    cp.logy.assign(M.n, 0.0);
    for (std::size_t j = 0; j < M.n; ++j)
      for (std::size_t i = 0; i < M.m; ++i) cp.logy[j] += M.free_pre(i, j).get_d() * lphi[i];
    auto coeff = M.coefficients(logq, comp);
    cp.value = M.W(coeff, cp.logy);
    double sc = 0;
    for (const auto& v : w) sc += std::abs(v);
    auto g = M.grad_log(coeff, cp.logy);
    double gn = 0;
    for (const auto& v : g) gn = std::max(gn, std::abs(v));
    cplx sw = 0;
    for (const auto& v : w) sw += v;
    cp.residual = std::max(gn, std::abs(cp.value - sw)) / sc;
    MatC Hs = MatC::Zero(M.n, M.n);
    for (std::size_t i = 0; i < M.m; ++i)
      for (std::size_t j = 0; j < M.n; ++j)
        for (std::size_t k = 0; k < M.n; ++k) Hs(j, k) += w[i] * M.bfree(i, j).get_d() * M.bfree(i, k).get_d();
    cp.hess_det = M.n ? Hs.determinant() : cplx(1);
    if (cp.residual > 1e-8) throw Error("SolverNoConvergence", "Batyrev root is not a critical point of W_q");
    CS.per_component[comp]++;
    CS.points.push_back(cp);
  }
  std::sort(CS.points.begin(), CS.points.end(), [](const CritPoint& a, const CritPoint& b) {
    if (a.component != b.component) return a.component < b.component;
    if (std::abs(a.value.real() - b.value.real()) > 1e-12) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (CS.per_component[c] != CS.expected_per_component)
      throw Error("CountMismatch", "component " + std::to_string(c) + " has " + std::to_string(CS.per_component[c]) +
                                       " critical points, expected " + std::to_string(CS.expected_per_component));
  return CS;
}

// ---------------------------------------------------------------- Newton polytope

namespace {

struct Facet {
  RatVec a;
  Rat beta;
  std::uint32_t mask;
};

std::vector<Facet> facets(const std::vector<RatVec>& pts) {
  const std::size_t N = pts.size(), n = pts[0].size();
  std::vector<Facet> out;
  std::set<std::uint32_t> seen;
  std::vector<std::size_t> idx(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t from) {
    if (pos == n) {
      RatMatrix A(n - 1, n);
      for (std::size_t k = 1; k < n; ++k)
        for (std::size_t c = 0; c < n; ++c) A(k - 1, c) = pts[idx[k]][c] - pts[idx[0]][c];
      auto ns = lattice::nullspace(A);
      if (ns.size() != 1) return;
      RatVec a = ns[0];
      Rat beta = dot(a, pts[idx[0]]);
      bool le = true, ge = true;
      std::uint32_t mask = 0;
      for (std::size_t i = 0; i < N; ++i) {
        Rat v = dot(a, pts[i]);
        if (v > beta) le = false;
        if (v < beta) ge = false;
        if (v == beta) mask |= 1u << i;
      }
      if (!le && !ge) return;
      if (!le) {
        for (auto& x : a) x = -x;
        beta = -beta;
      }
      if (le && ge) return;  // degenerate point set
      if (seen.insert(mask).second) out.push_back({a, beta, mask});
      return;
    }
    for (std::size_t i = from; i < N; ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  if (n == 1) {
    Rat lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    std::uint32_t ml = 0, mh = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (pts[i][0] == lo) ml |= 1u << i;
      if (pts[i][0] == hi) mh |= 1u << i;
    }
    out.push_back({RatVec{Rat(-1)}, -lo, ml});
    out.push_back({RatVec{Rat(1)}, hi, mh});
    return out;
  }
  rec(0, 0);
  return out;
}

}  // namespace

Rat hull_volume(const std::vector<RatVec>& pts) {
  const std::size_t n = pts[0].size();
  if (n == 1) {
    Rat lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return hi - lo;
  }
  RatVec c(n, Rat(0));
  for (const auto& p : pts)
    for (std::size_t k = 0; k < n; ++k) c[k] += p[k] / Rat(static_cast<long>(pts.size()));
  Rat vol = 0;
  for (const auto& F : facets(pts)) {
    std::size_t k = 0;
    while (F.a[k] == 0) ++k;
    std::vector<RatVec> proj;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if ((F.mask >> i) & 1u) {
        RatVec p;
        for (std::size_t t = 0; t < n; ++t)
          if (t != k) p.push_back(pts[i][t]);
        proj.push_back(p);
      }
    Rat h = F.beta - dot(F.a, c);
    Rat ak = F.a[k] < 0 ? Rat(-F.a[k]) : F.a[k];
    vol += h * hull_volume(proj) / (ak * Rat(static_cast<long>(n)));
  }
  return vol;
}

std::vector<std::uint32_t> polytope_faces(const std::vector<RatVec>& pts) {
  std::set<std::uint32_t> faces;
  for (const auto& F : facets(pts)) faces.insert(F.mask);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::uint32_t> cur(faces.begin(), faces.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        std::uint32_t x = cur[i] & cur[j];
        if (x && faces.insert(x).second) grew = true;
      }
  }
  return {faces.begin(), faces.end()};
}

VolumeReport volume_rank_check(const stack::InertiaData& X, const LGModel& M, std::size_t dim_orb) {
  VolumeReport rep;
  rep.dim_orb = dim_orb;
  rep.ntors = M.ntors();
  rep.fan_sum = 0;
  for (Subset I : X.max_anticones) {
    IntMatrix B(X.n, X.n);
    std::size_t row = 0;
    for (std::size_t j = 0; j < X.m; ++j)
      if (!has(I, j)) {
        for (std::size_t c = 0; c < X.n; ++c) B(row, c) = M.bfree(j, c);
        ++row;
      }
    rep.fan_sum += abs(lattice::det(B));
  }
  std::vector<RatVec> pts;
  for (std::size_t i = 0; i < X.m; ++i) {
    RatVec p;
    for (std::size_t c = 0; c < X.n; ++c) p.push_back(Rat(M.bfree(i, c)));
    pts.push_back(p);
  }
  Rat f = 1;
  for (std::size_t k = 2; k <= X.n; ++k) f *= static_cast<long>(k);
  rep.hull_nvol = hull_volume(pts) * f;
  if (!rep.ok())
    throw Error("IdentityViolated", "|N_tor| n! Vol: fan " + to_str(rep.fan_sum) + ", hull " + to_str(rep.hull_nvol) +
                                        ", |N_tor| " + to_str(rep.ntors) + ", dim H_orb " + std::to_string(dim_orb));
  return rep;
}

FaceReport kouchnirenko_face_check(const LGModel& M, const std::vector<cplx>& coeff, std::size_t samples,
                                   std::uint64_t seed) {
  std::vector<RatVec> pts;
  for (std::size_t i = 0; i < M.m; ++i) {
    RatVec p;
    for (std::size_t c = 0; c < M.n; ++c) p.push_back(Rat(M.bfree(i, c)));
    pts.push_back(p);
  }
  auto faces = polytope_faces(pts);
  FaceReport rep;
  rep.faces = faces.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-2, 2), im(-kPi, kPi);
  const std::size_t n = M.n;
  for (std::uint32_t F : faces) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < M.m; ++i)
      if ((F >> i) & 1u) idx.push_back(i);
    // a single monomial has nowhere vanishing gradient; distinct points on a face are not all zero
    if (idx.size() == 1) continue;
    // g = sum_i b_i t_i scales by a character along directions normal to the face, so search
    // only along the face: u = sum_k v_k d_k with d_k = b_k - b_0, residual divided by t_0
    const std::size_t i0 = idx[0], K = idx.size() - 1;
    std::vector<std::vector<double>> G(idx.size(), std::vector<double>(K, 0.0));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < n; ++j)
          G[a][k] += Int(M.bfree(idx[a], j) - M.bfree(i0, j)).get_d() * Int(M.bfree(idx[k + 1], j) - M.bfree(i0, j)).get_d();
    for (std::size_t s = 0; s < samples; ++s) {
      ++rep.starts;
      VecC v(K);
      for (std::size_t k = 0; k < K; ++k) v(k) = cplx(re(rng), im(rng)) * 0.5;
      for (int it = 0; it < 200; ++it) {
        VecC h = VecC::Zero(n);
        MatC J = MatC::Zero(n, K);
        double sc = 0;
        for (std::size_t a = 0; a < idx.size(); ++a) {
          cplx e = 0;
          for (std::size_t k = 0; k < K; ++k) e += G[a][k] * v(k);
          cplx t = coeff[idx[a]] / coeff[i0] * std::exp(e);
          sc += std::abs(t);
          for (std::size_t j = 0; j < n; ++j) {
            double bj = M.bfree(idx[a], j).get_d();
            h(j) += bj * t;
            for (std::size_t k = 0; k < K; ++k) J(j, k) += bj * G[a][k] * t;
          }
        }
        if (!v.allFinite() || v.real().cwiseAbs().maxCoeff() > 40) break;
        if (h.norm() < 1e-12 * sc) {
          std::string where;
          for (std::size_t j = 0; j < n; ++j) {
            cplx uj = 0;
            for (std::size_t k = 0; k < K; ++k) uj += Int(M.bfree(idx[k + 1], j) - M.bfree(i0, j)).get_d() * v(k);
            where += (j ? "," : "") + std::to_string(uj.real()) + (uj.imag() < 0 ? "" : "+") + std::to_string(uj.imag()) + "i";
          }
          std::string face;
          for (std::size_t i : idx) face += (face.empty() ? "" : ",") + std::to_string(i + 1);
          throw Error("DegeneracyWitness", "face {" + face + "} has a critical point at log y = (" + where + ")");
        }
        // Levenberg-Marquardt, the system is overdetermined and may be rank deficient
        MatC A = J.adjoint() * J;
        double lam = 1e-12 * A.norm() + 1e-300;
        VecC step = (A + lam * MatC::Identity(K, K)).ldlt().solve(J.adjoint() * h);
        double sn = step.norm();
        if (sn > 1) step /= sn;
        v -= step;
      }
    }
  }
  return rep;
}

std::vector<ResidueTerm> residue_series(const stack::InertiaData& X, const LGModel& M, long max_total) {
  std::vector<ResidueTerm> out;
  IntVec k(X.m, Int(0));
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
    if (i == X.m) {
      if (!X.N.represent(k).is_zero()) return;
      ResidueTerm t;
      t.k = k;
      t.qexp.assign(X.r, Rat(0));
      t.coeff = 1;
      long tot = 0;
      for (std::size_t j = 0; j < X.m; ++j) {
        for (std::size_t a = 0; a < X.r; ++a) t.qexp[a] += Rat(k[j]) * M.ell(j, a);
        for (Int f = 2; f <= k[j]; ++f) t.coeff /= Rat(f);
        tot += k[j].get_si();
      }
      t.zpow = static_cast<int>(-tot);
      out.push_back(t);
      return;
    }
    for (long v = 0; v <= left; ++v) {
      k[i] = v;
      rec(i + 1, left - v);
    }
    k[i] = 0;
  };
  rec(0, max_total);
  std::stable_sort(out.begin(), out.end(), [](const ResidueTerm& a, const ResidueTerm& b) {
    return a.zpow != b.zpow ? a.zpow > b.zpow : a.k < b.k;
  });
  return out;
}

cplx residue_eval(const std::vector<ResidueTerm>& s, const std::vector<cplx>& logq, cplx z) {
  cplx acc = 0;
  for (const auto& t : s) {
    cplx e = 0;
    for (std::size_t a = 0; a < logq.size(); ++a) e += t.qexp[a].get_d() * logq[a];
    acc += t.coeff.get_d() * std::exp(e) * std::pow(z, t.zpow);
  }
  return acc;
}

}  // namespace tmir::mirror_lg
