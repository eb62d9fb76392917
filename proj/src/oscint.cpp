#include "torimirror/oscint.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace tmir::oscint {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);
constexpr std::size_t kBlock = 1024;

struct Rule {
  std::vector<double> x, w;
};

// tanh-sinh on [-T, T] with step h = 2^{-level}
Rule tanh_sinh(double T, int level) {
  Rule R;
  const double h = std::ldexp(1.0, -level);
  const long K = static_cast<long>(std::ceil(3.2 / h));
  for (long k = -K; k <= K; ++k) {
    double s = k * h;
    double u = kPi / 2 * std::sinh(s);
    double c = std::cosh(u);
    R.x.push_back(T * std::tanh(u));
    R.w.push_back(T * h * kPi / 2 * std::cosh(s) / (c * c));
  }
  return R;
}

cplx pairwise(const std::vector<cplx>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    cplx s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

// sum of f over a flat index range; fixed block layout so the result does not depend on thread count
template <class F>
cplx flat_sum(std::size_t total, bool parallel, F&& f) {
  if (!parallel) {
    cplx s = 0;
    for (std::size_t i = 0; i < total; ++i) s += f(i);
    return s;
  }
  const std::size_t nb = (total + kBlock - 1) / kBlock;
  std::vector<cplx> part(nb);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    cplx s = 0;
    const std::size_t end = std::min(total, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) s += f(i);
    part[b] = s;
  }
  return pairwise(part, 0, nb);
}

std::vector<double> positive_coeffs(const LGModel& M, const std::vector<double>& q) {
  std::vector<double> c(M.m, 1.0);
  for (std::size_t i = 0; i < M.m; ++i)
    for (std::size_t a = 0; a < M.r; ++a) c[i] *= std::pow(q[a], M.ell(i, a).get_d());
  return c;
}

struct Exponents {
  std::size_t m, n;
  std::vector<double> b;  // m x n
  explicit Exponents(const LGModel& M) : m(M.m), n(M.n), b(M.m * M.n) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) b[i * n + j] = M.bfree(i, j).get_d();
  }
  template <class T>
  T W(const std::vector<T>& c, const T* t) const {
    T s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      T e = 0;
      for (std::size_t j = 0; j < n; ++j) e += b[i * n + j] * t[j];
      s += c[i] * std::exp(e);
    }
    return s;
  }
};

// product rule over per-axis rules
cplx product_rule(const Exponents& E, const std::vector<double>& c, double z, const std::vector<Rule>& axes, bool parallel) {
  const std::size_t n = axes.size();
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.x.size();
  return flat_sum(total, parallel, [&](std::size_t flat) {
    double t[8];
    double w = 1;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t k = flat % axes[j].x.size();
      flat /= axes[j].x.size();
      t[j] = axes[j].x[k];
      w *= axes[j].w[k];
    }
    return cplx(w * std::exp(-E.W(c, t) / z));
  });
}

double binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Smolyak combination of tanh-sinh rules; levels counted from `base`
cplx sparse_rule(const Exponents& E, const std::vector<double>& c, double z, double T, int base, int L, bool parallel,
                 std::size_t* nodes) {
  const long n = static_cast<long>(E.n);
  cplx acc = 0;
  std::vector<int> l(n, 1);
  std::function<void(long, int)> rec = [&](long j, int used) {
    if (j == n) {
      long q = L + n - 1 - used;
      if (q < 0 || q > n - 1) return;
      double coef = ((q % 2) ? -1.0 : 1.0) * binom(n - 1, q);
      std::vector<Rule> axes;
      std::size_t cnt = 1;
      for (long k = 0; k < n; ++k) {
        axes.push_back(tanh_sinh(T, base + l[k] - 1));
        cnt *= axes.back().x.size();
      }
      *nodes += cnt;
      acc += coef * product_rule(E, c, z, axes, parallel);
      return;
    }
    for (int v = 1; used + v <= L + n - 1; ++v) {
      l[j] = v;
      rec(j + 1, used + v);
    }
  };
  rec(0, 0);
  return acc;
}

}  // namespace

double choose_window(const LGModel& M, const std::vector<double>& coeff, double z, int digits) {
  const Exponents E(M);
  const std::size_t n = M.n;
  const double need = z * (digits + 6) * std::log(10.0);
  const std::size_t g = n <= 2 ? 65 : 17;
  double T = 1;
  for (int it = 0; it < 200; ++it, T *= 1.15) {
    double lo = INFINITY;
    std::size_t pts = 1;
    for (std::size_t k = 1; k < n; ++k) pts *= g;
    for (std::size_t face = 0; face < 2 * n; ++face)
      for (std::size_t p = 0; p < pts; ++p) {
        double t[8];
        std::size_t f = p;
        for (std::size_t j = 0, k = 0; j < n; ++j) {
          if (j == face / 2) {
            t[j] = face % 2 ? T : -T;
            continue;
          }
          t[j] = -T + 2 * T * double(f % g) / double(g - 1);
          f /= g;
          ++k;
        }
        lo = std::min(lo, E.W(coeff, t));
      }
    if (lo >= need) return T * 1.1;  // margin for the grid
  }
  throw Error("ToleranceUnmet", "no integration window found");
}

QuadResult real_thimble_integral(const LGModel& M, const std::vector<double>& q, double z, const QuadratureSpec& spec,
                                 bool parallel) {
  for (double x : q)
    if (!(x > 0)) throw Error("InvalidInput", "real thimble needs q_a > 0");
  if (!(z > 0)) throw Error("InvalidInput", "real thimble needs z > 0");
  const std::size_t n = M.n;
  if (n > 8) throw Error("InvalidInput", "dimension above 8 is not supported");
  const bool sparse = n > 3;
  if (sparse && !spec.sparse_override)
    throw Error("DimensionGuard", "n = " + std::to_string(n) + " > 3 needs the sparse-grid override");
  auto c = positive_coeffs(M, q);
  const Exponents E(M);
  QuadResult res;
  res.sparse = sparse;
  res.window = spec.window > 0 ? spec.window : choose_window(M, c, z, spec.digits);
  const cplx norm = std::pow(2 * kPi * kI, -static_cast<int>(n)) / M.ntors().get_d();
  cplx prev = 0;
  for (int lev = spec.min_level; lev <= spec.max_level; ++lev) {
    cplx v;
    std::size_t nodes = 0;
    if (sparse) {
      v = sparse_rule(E, c, z, res.window, spec.min_level, lev - spec.min_level + 1, parallel, &nodes);
    } else {
      std::vector<Rule> axes(n, tanh_sinh(res.window, lev));
      v = product_rule(E, c, z, axes, parallel);
      nodes = 1;
      for (const auto& a : axes) nodes *= a.x.size();
    }
    v *= norm;
    res.value = v;
    res.level = lev;
    res.nodes = nodes;
    if (lev > spec.min_level) {
      res.error = std::abs(v - prev);
      res.level_errors.push_back(res.error);
      if (res.error <= spec.tol * std::abs(v)) return res;
    }
    prev = v;
  }
  throw Error("ToleranceUnmet", "achieved relative estimate " + std::to_string(res.error / std::abs(res.value)) +
                                    " at level " + std::to_string(res.level));
}

cplx compact_cycle_integral(const LGModel& M, const std::vector<cplx>& logq, cplx z, std::size_t nodes, bool parallel) {
  const std::size_t n = M.n;
  const Exponents E(M);
  const std::size_t ncomp = M.components().size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= nodes;
  // with y = e^{i theta}, (2 pi i)^{-n} prod dy/y is the normalized Haar measure
  cplx acc = 0;
  for (std::size_t comp = 0; comp < ncomp; ++comp) {
    auto c = M.coefficients(logq, comp);
    cplx s = flat_sum(total, parallel, [&](std::size_t flat) {
      cplx t[8];
      for (std::size_t j = 0; j < n; ++j) {
        t[j] = kI * (2 * kPi * double(flat % nodes) / double(nodes));
        flat /= nodes;
      }
      return std::exp(-E.W(c, t) / z);
    });
    acc += s / double(total);
  }
  return acc / double(ncomp);
}

ResidueValue residue_value(const stack::InertiaData& X, const LGModel& M, const std::vector<cplx>& logq, cplx z) {
  // degrees may be confined to a sublattice of shells, so compare successive doublings
  ResidueValue out;
  cplx prev = mirror_lg::residue_eval(mirror_lg::residue_series(X, M, 6), logq, z);
  for (long K = 12; K <= 96; K *= 2) {
    out.value = mirror_lg::residue_eval(mirror_lg::residue_series(X, M, K), logq, z);
    out.tail = std::abs(out.value - prev);
    out.order = K;
    if (out.tail < 1e-16 * std::max(1.0, std::abs(out.value))) break;
    prev = out.value;
  }
  return out;
}

IdentityReport verify_mirror_identities(const hypergeom::Hypergeom& G, const LGModel& M, const std::vector<double>& q,
                                        double z, const Rat& cap, double tol, const QuadratureSpec& spec) {
  IdentityReport rep;
  const auto& C = G.chern();
  hypergeom::HValue hs, hp;
  rep.z_structure = G.central_charge(chern::KClass::structure_sheaf(M.r), q, z, cap, &hs);
  rep.z_point = G.central_charge(C.point(), q, z, cap, &hp);
  rep.h_tail = std::max(hs.tail_estimate, hp.tail_estimate);

  QuadratureSpec s = spec;
  s.tol = std::min(s.tol, tol * 1e-2);
  auto Q = real_thimble_integral(M, q, z, s);
  rep.thimble = Q.value;
  rep.thimble_error = Q.error;
  rep.str_rel = std::abs(rep.thimble - rep.z_structure) / std::abs(rep.z_structure);
  rep.pass_str = rep.str_rel < tol;

  std::vector<cplx> logq;
  for (double x : q) logq.push_back(std::log(x));
  rep.compact = compact_cycle_integral(M, logq, z, 64);
  // the torus average of e^{-W/z} is the residue series at -z
  auto R = residue_value(G.X(), M, logq, -z);
  rep.residue = R.value;
  rep.residue_tail = R.tail;
  rep.sky_rel_residue = std::abs(rep.compact - rep.residue) / std::abs(rep.residue);
  rep.sky_rel_point = std::abs(rep.compact - rep.z_point) / std::abs(rep.z_point);
  rep.pass_sky = rep.sky_rel_residue < tol && rep.sky_rel_point < tol;
  return rep;
}

}  // namespace tmir::oscint
