#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "torimirror/hypergeom.hpp"
#include "torimirror/mirror_lg.hpp"

using namespace tmir;
using namespace tmir::mirror_lg;

namespace {

constexpr double kPi = std::numbers::pi;

struct LSetup {
  fx::Setup s;
  LGModel M;
  explicit LSetup(const stack::StackInitialData& d) : s(d), M(build_lg(s.X, s.B)) {}
  Int per_component() const { return Int(static_cast<long>(s.H->total_dim())) / M.ntors(); }
};

std::vector<cplx> logs(std::initializer_list<double> q) {
  std::vector<cplx> out;
  for (double x : q) out.push_back(std::log(x));
  return out;
}

}  // namespace

TEST_CASE("LG model splitting and Batyrev relations") {
  LSetup p1(fx::P1());
  CHECK(p1.M.n == 1);
  CHECK(p1.M.ntors() == 1);
  // q = w1 w2 with w1 = w2 = P  ->  q = P^2
  auto q = batyrev_q(p1.M, {cplx(0.3, 0.1)});
  CHECK(std::abs(q[0] - std::pow(cplx(0.3, 0.1), 2)) < 1e-14);

  LSetup p12(fx::P12());
  auto q2 = batyrev_q(p12.M, {cplx(0.2)});
  CHECK(std::abs(q2[0] - 4.0 * std::pow(0.2, 3)) < 1e-14);

  LSetup p2(fx::P2());
  auto q3 = batyrev_q(p2.M, {cplx(0.2)});
  CHECK(std::abs(q3[0] - std::pow(0.2, 3)) < 1e-14);
  CHECK(batyrev_relations(p2.M).size() == 1);

  // sum_i D_i ell_i = p
  for (auto* L : {&p1, &p12, &p2}) {
    Rat s = 0;
    for (std::size_t i = 0; i < L->M.m; ++i) s += Rat(L->s.X.data.D(i, 0)) * L->M.ell(i, 0);
    CHECK(s == Rat(L->s.B.P(0, 0)));
  }
}

TEST_CASE("critical values of P1 and P2") {
  LSetup p1(fx::P1());
  double q = 0.01;
  auto cs = jacobi_critical_points(p1.M, logs({q}), p1.per_component(), {});
  REQUIRE(cs.points.size() == 2);
  CHECK(std::abs(cs.points[0].value + 2 * std::sqrt(q)) < 1e-12);
  CHECK(std::abs(cs.points[1].value - 2 * std::sqrt(q)) < 1e-12);
  for (const auto& p : cs.points) {
    CHECK(p.residual < 1e-10);
    IntVec d{Int(1)};
    CHECK(batyrev_residual(p1.M, d, logs({q}), p.w) < 1e-10);
  }

  LSetup p2(fx::P2());
  auto c2 = jacobi_critical_points(p2.M, logs({0.05}), p2.per_component(), {});
  REQUIRE(c2.points.size() == 3);
  double mod = 3 * std::cbrt(0.05);
  for (const auto& p : c2.points) {
    CHECK(std::abs(std::abs(p.value) - mod) < 1e-12);
    // value^3 = 27 q
    CHECK(std::abs(std::pow(p.value, 3) - 27 * 0.05) < 1e-12);
    CHECK(std::abs(p.hess_det) > 1e-6);
  }
}

TEST_CASE("critical points on P(1,2), P(1,2,3), P1xP1, P112ext") {
  for (auto d : {fx::P12(), fx::P123(), fx::P1xP1(), fx::P112ext(), fx::P112()}) {
    LSetup L(d);
    std::vector<cplx> lq;
    for (std::size_t a = 0; a < L.M.r; ++a) lq.push_back(std::log(0.02 * (1 + a)));
    auto cs = jacobi_critical_points(L.M, lq, L.per_component(), {});
    CHECK(cs.points.size() == L.s.H->total_dim());
  }
  // P(1,2): critical values 3 (q/4)^{1/3} up to cube roots of unity, since W = y + q/y^2 ... rescaled
  LSetup p12(fx::P12());
  auto cs = jacobi_critical_points(p12.M, logs({0.01}), p12.per_component(), {});
  for (const auto& p : cs.points) {
    // from q = 4 P^3 and W = w1 + w2 = 3P
    cplx P = p.P[0];
    CHECK(std::abs(p.value - 3.0 * P) < 1e-12);
    CHECK(std::abs(4.0 * P * P * P - 0.01) < 1e-14);
  }
}

TEST_CASE("gerbe components") {
  // P1 x B(Z/2): D = (2,2)
  LSetup g(fx::make(1, {{2}, {2}}, {1}));
  CHECK(g.M.ntors() == 2);
  CHECK(g.M.components().size() == 2);
  auto cs = jacobi_critical_points(g.M, logs({0.01}), g.per_component(), {});
  CHECK(cs.per_component == std::vector<std::size_t>{2, 2});
  auto rep = volume_rank_check(g.s.X, g.M, g.s.H->total_dim());
  CHECK(rep.ok());
}

TEST_CASE("domain and count errors") {
  LSetup p1(fx::P1());
  CHECK_THROWS_WITH_AS(jacobi_critical_points(p1.M, logs({0.5}), Int(2), {}), doctest::Contains("OutsideSmallQDomain"),
                       Error);
  SolverOptions o;
  o.override_domain = true;
  CHECK(jacobi_critical_points(p1.M, logs({0.5}), Int(2), o).points.size() == 2);
  CHECK_THROWS_WITH_AS(jacobi_critical_points(p1.M, logs({0.01}), Int(3), {}), doctest::Contains("CountMismatch"),
                       Error);
}

TEST_CASE("hull volume and faces") {
  using V = std::vector<RatVec>;
  CHECK(hull_volume(V{{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}}) == Rat(1, 2));
  CHECK(hull_volume(V{{Rat(0), Rat(0)}, {Rat(2), Rat(0)}, {Rat(0), Rat(2)}, {Rat(2), Rat(2)}, {Rat(1), Rat(1)}}) == 4);
  V cube;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) cube.push_back({Rat(a), Rat(b), Rat(c)});
  CHECK(hull_volume(cube) == 1);
  V oct{{Rat(1), Rat(0), Rat(0)}, {Rat(-1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)},
        {Rat(0), Rat(-1), Rat(0)}, {Rat(0), Rat(0), Rat(1)}, {Rat(0), Rat(0), Rat(-1)}};
  CHECK(hull_volume(oct) == Rat(4, 3));
  // square: 4 edges + 4 vertices
  V sq{{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1), Rat(1)}, {Rat(0), Rat(1)}};
  CHECK(polytope_faces(sq).size() == 8);
  CHECK(polytope_faces(cube).size() == 6 + 12 + 8);
}

TEST_CASE("volume equals orbifold cohomology rank") {
  for (auto d : {fx::P1(), fx::P2(), fx::P12(), fx::P112(), fx::P123(), fx::P1xP1(), fx::P112ext()}) {
    LSetup L(d);
    auto rep = volume_rank_check(L.s.X, L.M, L.s.H->total_dim());
    CHECK(rep.ok());
    CHECK(rep.fan_sum == rep.hull_nvol);
  }
  LSetup p2(fx::P2());
  CHECK(volume_rank_check(p2.s.X, p2.M, 3).hull_nvol == 3);
  LSetup p12(fx::P12());
  CHECK(volume_rank_check(p12.s.X, p12.M, 3).hull_nvol == 3);
  LSetup p11(fx::P1xP1());
  CHECK(volume_rank_check(p11.s.X, p11.M, 4).hull_nvol == 4);
  CHECK_THROWS_WITH_AS(volume_rank_check(p2.s.X, p2.M, 4), doctest::Contains("IdentityViolated"), Error);
}

TEST_CASE("convenience on faces") {
  for (auto d : {fx::P1(), fx::P2(), fx::P12(), fx::P1xP1(), fx::P112ext()}) {
    LSetup L(d);
    std::vector<cplx> lq;
    for (std::size_t a = 0; a < L.M.r; ++a) lq.push_back(std::log(0.03 * (1 + a)));
    auto rep = kouchnirenko_face_check(L.M, L.M.coefficients(lq, 0), 6);
    CHECK(rep.faces > 0);
  }
  // P112ext: b1 = (-1,-2)?, b4 on the edge b1 b3; pick coefficients with c4^2 = 4 c1 c3
  LSetup e(fx::P112ext());
  std::vector<RatVec> pts;
  for (std::size_t i = 0; i < e.M.m; ++i) pts.push_back({Rat(e.M.bfree(i, 0)), Rat(e.M.bfree(i, 1))});
  std::vector<std::size_t> edge;
  for (auto F : polytope_faces(pts))
    if (std::popcount(F) == 3) {
      for (std::size_t i = 0; i < e.M.m; ++i)
        if ((F >> i) & 1u) edge.push_back(i);
    }
  REQUIRE(edge.size() == 3);
  // middle point of the edge gets coefficient 2, the ends 1: (y^a + y^b)^2 shape has a double root
  std::vector<cplx> c(e.M.m, 1.0);
  std::size_t mid = 3;  // b4 = (b1+b3)/2
  CHECK(std::find(edge.begin(), edge.end(), mid) != edge.end());
  c[mid] = 2.0;
  CHECK_THROWS_WITH_AS(kouchnirenko_face_check(e.M, c, 8), doctest::Contains("DegeneracyWitness"), Error);
}

TEST_CASE("residue series equals point restriction of H") {
  for (auto d : {fx::P1(), fx::P2(), fx::P12(), fx::P1xP1(), fx::P112ext(), fx::make(1, {{2}, {2}}, {1})}) {
    fx::Setup s(d);
    LGModel M = build_lg(s.X, s.B);
    chern::Chern C(*s.H);
    hypergeom::Hypergeom G(C);
    const long K = 6;
    auto res = residue_series(s.X, M, K);
    auto pr = G.point_restriction(Rat(20));
    std::map<RatVec, Rat> a, b;
    for (const auto& t : res) a[t.qexp] += t.coeff;
    for (const auto& [dd, c] : pr) {
      Rat tot = 0;
      for (std::size_t i = 0; i < s.X.m; ++i) tot += s.X.pair(i, dd);
      if (tot > K) continue;
      RatVec qe(s.X.r, Rat(0));
      for (std::size_t aa = 0; aa < s.X.r; ++aa)
        for (std::size_t cc = 0; cc < s.X.r; ++cc) qe[aa] += Rat(s.B.P(aa, cc)) * dd[cc];
      b[qe] += c;
    }
    CHECK(a == b);
    CHECK(!a.empty());
  }
  // P1: sum_k q^k z^{-2k} / k!^2 = I_0(2 sqrt q / z)
  fx::Setup s(fx::P1());
  LGModel M = build_lg(s.X, s.B);
  auto res = residue_series(s.X, M, 30);
  double q = 0.04, z = 0.7;
  double bessel = 0, term = 1;
  for (int k = 0; k < 20; ++k) {
    bessel += term;
    term *= q / (z * z) / ((k + 1.0) * (k + 1.0));
  }
  CHECK(std::abs(residue_eval(res, logs({q}), z) - bessel) < 1e-13);
  (void)kPi;
}
