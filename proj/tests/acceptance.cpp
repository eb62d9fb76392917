// Acceptance criteria 1-10: one PASS/FAIL line each.
#include <boost/math/special_functions/bessel.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "torimirror/oscint.hpp"

using namespace tmir;
using chern::KClass;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);

struct Full {
  fx::Setup s;
  chern::Chern C;
  hypergeom::Hypergeom G;
  mirror_lg::LGModel M;
  explicit Full(const stack::StackInitialData& d) : s(d), C(*s.H), G(C), M(mirror_lg::build_lg(s.X, s.B)) {}
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int k, const std::string& title, const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream note;
  bool ok = false;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note << " exception: " << e.what();
    ok = false;
  }
  double dt = seconds_since(t0);
  if (!ok) ++failures;
  std::printf("[%s] ACCEPTANCE %d: %s |%s (%.2f s)\n", ok ? "PASS" : "FAIL", k, title.c_str(), note.str().c_str(), dt);
  std::fflush(stdout);
}

IntVec p_line(const fx::Setup& s, std::size_t a, long k) {
  IntVec xp(s.X.r, Int(0));
  xp[a] = k;
  return s.B.from_p_coords(xp);
}

}  // namespace

int main() {
  criterion(1, "volume equals orbifold cohomology rank", [](std::ostringstream& o) {
    auto t0 = std::chrono::steady_clock::now();
    struct C {
      const char* name;
      stack::StackInitialData d;
      long expect;
    };
    bool ok = true;
    for (const auto& c : {C{"P1", fx::P1(), 2}, C{"P2", fx::P2(), 3}, C{"P1xP1", fx::P1xP1(), 4}, C{"P(1,2)", fx::P12(), 3},
                          C{"P(1,1,2)", fx::P112(), 4}}) {
      fx::Setup s(c.d);
      auto M = mirror_lg::build_lg(s.X, s.B);
      auto rep = mirror_lg::volume_rank_check(s.X, M, s.H->total_dim());
      Int lhs = Int(rep.ntors) * Int(rep.hull_nvol.get_num());
      bool good = rep.hull_nvol.get_den() == 1 && lhs == c.expect && s.H->total_dim() == std::size_t(c.expect) &&
                  rep.fan_sum == rep.hull_nvol;
      o << " " << c.name << "=" << to_str(rep.hull_nvol) << (good ? "" : "!");
      ok = ok && good;
    }
    double dt = seconds_since(t0);
    o << " time " << dt;
    return ok && dt < 1.0;
  });

  criterion(2, "GKZ operators annihilate I exactly", [](std::ostringstream& o) {
    struct C {
      const char* name;
      stack::StackInitialData d;
      long order;
    };
    bool ok = true;
    for (const auto& c : {C{"P1", fx::P1(), 6}, C{"P2", fx::P2(), 6}, C{"P(1,2)", fx::P12(), 4}, C{"P1xP1", fx::P1xP1(), 4},
                          C{"P(1,1,2)ext", fx::P112ext(), 4}}) {
      auto t0 = std::chrono::steady_clock::now();
      Full f(c.d);
      auto gens = f.G.gkz_generators();
      auto reps = f.G.gkz_annihilation_check(gens, Rat(c.order));
      bool good = !reps.empty();
      for (const auto& r : reps) good = good && r.zero && r.certified >= Rat(c.order);
      double dt = seconds_since(t0);
      good = good && dt < 10;
      o << " " << c.name << (good ? " ok" : " FAIL") << "(" << reps.size() << " ops, order " << c.order << ")";
      ok = ok && good;
    }
    return ok;
  });

  criterion(3, "mirror map is log q plus the extra-ray term", [](std::ostringstream& o) {
    Full p1(fx::P1()), p12(fx::P12()), ext(fx::P112ext());
    bool a = p1.G.mirror_map(Rat(6)).pure_log();
    bool b = p12.G.mirror_map(Rat(4)).pure_log();
    auto mm = ext.G.mirror_map(Rat(4));
    // 1_{b4}: the unit of the sector whose group element is b4
    const std::size_t j = 3;
    std::size_t sec = ext.s.X.box.size();
    for (const auto& bx : ext.s.X.box)
      if (bx.v == ext.s.X.b[j]) sec = bx.index;
    RatVec unit(ext.s.H->ring(sec).dim(), Rat(0));
    unit[0] = 1;
    RatVec dvee = ext.s.B.Dvee.at(j);
    bool c = false;
    for (const auto& t : mm.terms)
      if (t.d == dvee) c = t.kind == "extra" && t.sector == sec && t.value == unit;
    o << " P1 " << (a ? "pure log" : "FAIL") << ", P(1,2) " << (b ? "pure log" : "FAIL") << ", P(1,1,2)ext q^{D4^vee} "
      << (c ? "= 1_{b4}" : "FAIL") << " age " << to_str(ext.s.X.box[sec < ext.s.X.box.size() ? sec : 0].age);
    return a && b && c;
  });

  criterion(4, "Riemann-Roch integrality and unimodular Gram matrices", [](std::ostringstream& o) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    Full p1(fx::P1()), p12(fx::P12());
    for (long k = -6; k <= 6; ++k) ok = ok && p1.C.chi(KClass::line(p_line(p1.s, 0, k))).integer == k + 1;
    for (long k = 0; k <= 8; ++k) ok = ok && p12.C.chi(KClass::line(p_line(p12.s, 0, k))).integer == k / 2 + 1;
    o << " chi " << (ok ? "ok" : "FAIL");
    struct C {
      stack::StackInitialData d;
      std::vector<std::vector<long>> basis;  // p coordinates
    };
    for (const auto& c : {C{fx::P1(), {{0}, {-1}}}, C{fx::P2(), {{0}, {-1}, {-2}}}, C{fx::P12(), {{0}, {-1}, {-2}}},
                          C{fx::P112(), {{0}, {-1}, {-2}, {-3}}}, C{fx::P1xP1(), {{0, 0}, {-1, 0}, {0, -1}, {-1, -1}}}}) {
      Full f(c.d);
      const std::size_t n = c.basis.size();
      if (n != f.s.H->total_dim()) return false;
      std::vector<IntVec> xi;
      for (const auto& b : c.basis) {
        IntVec xp;
        for (long v : b) xp.push_back(Int(v));
        xi.push_back(f.s.B.from_p_coords(xp));
      }
      // integer Gram matrix and its determinant by fraction-free elimination
      RatMatrix G(n, n);
      double dev = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          auto r = f.C.mukai_pairing(KClass::line(xi[i]), KClass::line(xi[j]));
          dev = std::max({dev, std::abs(r.value.real() - r.integer.get_d()), std::abs(r.value.imag())});
          G(i, j) = Rat(r.integer);
        }
      Rat det = lattice::det(G);
      bool good = dev < 1e-8 && (det == 1 || det == -1) && lattice::rank(G) == n;
      o << " det=" << to_str(det);
      ok = ok && good;
    }
    double dt = seconds_since(t0);
    return ok && dt < 5;
  });

  criterion(5, "sol pairing equals Mukai pairing", [](std::ostringstream& o) {
    double worst = 0;
    for (auto d : {fx::P1(), fx::P2(), fx::P12(), fx::P112(), fx::P1xP1(), fx::P123()}) {
      Full f(d);
      std::vector<KClass> basis;
      for (std::size_t k = 0; k < f.s.H->total_dim(); ++k)
        basis.push_back(KClass::line(p_line(f.s, 0, -static_cast<long>(k))));
      if (f.s.X.r == 2) basis = {KClass::line(p_line(f.s, 0, 0)), KClass::line(p_line(f.s, 0, -1)),
                                 KClass::line(p_line(f.s, 1, -1)),
                                 f.C.tensor(KClass::line(p_line(f.s, 0, -1)), KClass::line(p_line(f.s, 1, -1)))};
      basis.push_back(f.C.point());
      for (const auto& a : basis)
        for (const auto& b : basis) worst = std::max(worst, std::abs(f.C.sol_pairing(a, b) - f.C.mukai_pairing(a, b).value));
    }
    o << " max discrepancy " << worst;
    return worst < 1e-8;
  });

  criterion(6, "Gamma-Todd identity on every sector", [](std::ostringstream& o) {
    double worst = 0;
    for (auto d : {fx::P1(), fx::P2(), fx::P12(), fx::P112(), fx::P123(), fx::P1xP1(), fx::P112ext()}) {
      fx::Setup s(d);
      chern::Chern C(*s.H);
      for (std::size_t v = 0; v < s.H->sectors(); ++v) worst = std::max(worst, C.gamma_todd_identity_check(v, 4));
    }
    // P(1,2) twisted sector: Gamma(f) Gamma(1-f) at f = 1/2 against pi / sin(pi/2)
    fx::Setup s(fx::P12());
    chern::Chern C(*s.H);
    std::size_t v = 1;
    const auto& g = C.gamma_class();
    cplx prod = g[s.H->offset(v)] * g[s.H->offset(s.X.box[v].inv)];
    double closed = std::abs(prod - kPi / std::sin(kPi / 2));
    o << " max coefficient error " << worst << ", Gamma(1/2)^2 - pi = " << closed;
    return worst < 1e-10 && closed < 1e-12;
  });

  criterion(7, "skyscraper central charge: residue series, point restriction, compact cycle", [](std::ostringstream& o) {
    bool ok = true;
    for (auto d : {fx::P1(), fx::P12()}) {
      Full f(d);
      const long K = 8;
      std::map<RatVec, Rat> a, b;
      for (const auto& t : mirror_lg::residue_series(f.s.X, f.M, K)) a[t.qexp] += t.coeff;
      for (const auto& [dd, c] : f.G.point_restriction(Rat(2 * K))) {
        Rat tot = 0;
        for (std::size_t i = 0; i < f.s.X.m; ++i) tot += f.s.X.pair(i, dd);
        if (tot <= K) b[f.s.B.p_pairings(dd)] += c;
      }
      bool exact = a == b && !a.empty();
      double q = 0.05, z = 1.0;
      cplx cc = oscint::compact_cycle_integral(f.M, {std::log(q)}, z, 64);
      auto rv = oscint::residue_value(f.s.X, f.M, {std::log(q)}, -z);
      cplx zp = f.G.central_charge(f.C.point(), {q}, z, Rat(16));
      double e1 = std::abs(cc - rv.value), e2 = std::abs(cc - zp);
      o << " " << (d.D.rows == 2 && d.D(1, 0) == 2 ? "P(1,2)" : "P1") << (exact ? " exact" : " MISMATCH") << " |cc-res|=" << e1
        << " |cc-Z|=" << e2;
      ok = ok && exact && e1 < 1e-10 && e2 < 1e-10;
    }
    return ok;
  });

  criterion(8, "structure sheaf central charge equals the real thimble integral", [](std::ostringstream& o) {
    bool ok = true;
    struct C {
      const char* name;
      stack::StackInitialData d;
      double q, tol;
    };
    for (const auto& c : {C{"P1", fx::P1(), 0.01, 1e-6}, C{"P(1,2)", fx::P12(), 0.05, 1e-5}, C{"P2", fx::P2(), 0.01, 1e-5}}) {
      auto t0 = std::chrono::steady_clock::now();
      Full f(c.d);
      auto quad = oscint::real_thimble_integral(f.M, {c.q}, 1.0, {});
      cplx Z = f.G.central_charge(KClass::structure_sheaf(1), {c.q}, 1.0, Rat(16));
      double rel = std::abs(quad.value - Z) / std::abs(Z);
      bool good = rel < c.tol;
      o << " " << c.name << " rel " << rel;
      if (std::string(c.name) == "P1") {
        cplx bessel = 2 * boost::math::cyl_bessel_k(0, 2 * std::sqrt(c.q)) / (2 * kPi * kI);
        double r3 = std::max(std::abs(bessel - Z), std::abs(bessel - quad.value)) / std::abs(bessel);
        o << " (K0 " << r3 << ")";
        good = good && r3 < c.tol;
      }
      good = good && seconds_since(t0) < 60;
      ok = ok && good;
    }
    return ok;
  });

  criterion(9, "Galois action matches monodromy", [](std::ostringstream& o) {
    double worst = 0;
    for (auto d : {fx::P12(), fx::P1xP1()}) {
      Full f(d);
      for (std::size_t a = 0; a < f.s.X.r; ++a) {
        auto rep = f.G.galois_monodromy_check(p_line(f.s, a, 1), Rat(4));
        worst = std::max({worst, rep.max_coeff_error, rep.max_value_error});
      }
    }
    o << " max error " << worst;
    return worst < 1e-12;
  });

  criterion(10, "critical point count equals dim H_orb", [](std::ostringstream& o) {
    bool ok = true;
    double worst = 0;
    for (auto d : {fx::P1(), fx::P2(), fx::P12(), fx::P112(), fx::P123(), fx::P1xP1(), fx::P112ext()}) {
      Full f(d);
      Int per = Int(static_cast<long>(f.s.H->total_dim())) / f.M.ntors();
      for (double q : {0.003, 0.02, 0.07}) {
        std::vector<cplx> lq;
        for (std::size_t a = 0; a < f.M.r; ++a) lq.push_back(cplx(std::log(q * (1 + 0.3 * a)), 0.1 * (a + 1)));
        auto cs = mirror_lg::jacobi_critical_points(f.M, lq, per, {});
        ok = ok && cs.points.size() == f.s.H->total_dim();
        for (const auto& p : cs.points)
          for (std::size_t a = 0; a < f.M.r; ++a) {
            IntVec e(f.M.r, Int(0));
            e[a] = 1;
            worst = std::max(worst, mirror_lg::batyrev_residual(f.M, e, lq, p.w));
          }
      }
    }
    o << " 7 examples x 3 q, max Batyrev residual " << worst;
    return ok && worst < 1e-10;
  });

  std::printf("%d of 10 acceptance criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
