#include <random>

#include "doctest.h"
#include "torimirror/lattice.hpp"

using namespace tmir;
using namespace tmir::lattice;

namespace {

IntMatrix mk(std::size_t r, std::size_t c, std::vector<long> v) {
  IntMatrix m(r, c);
  for (std::size_t k = 0; k < v.size(); ++k) m.a[k] = v[k];
  return m;
}

// Oracle: k-th determinantal divisor = gcd of all k x k minors.
Int det_divisor(const IntMatrix& M, std::size_t k) {
  Int g = 0;
  std::vector<std::size_t> rs, cs;
  std::function<void(std::size_t)> pick_c;
  std::function<void(std::size_t)> pick_r = [&](std::size_t s) {
    if (rs.size() == k) return pick_c(0);
    for (std::size_t i = s; i < M.rows; ++i) rs.push_back(i), pick_r(i + 1), rs.pop_back();
  };
  pick_c = [&](std::size_t s) {
    if (cs.size() == k) {
      IntMatrix sub(k, k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) sub(a, b) = M(rs[a], cs[b]);
      Int d = det(sub);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      return;
    }
    for (std::size_t j = s; j < M.cols; ++j) cs.push_back(j), pick_c(j + 1), cs.pop_back();
  };
  pick_r(0);
  return g;
}

void check_snf(const IntMatrix& M) {
  auto s = smith_normal_form(M);
  CHECK(s.U * s.S * s.V == M);
  CHECK(abs(det(s.U)) == 1);
  CHECK(abs(det(s.V)) == 1);
  std::size_t k = std::min(M.rows, M.cols);
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t j = 0; j < M.cols; ++j)
      if (i != j) CHECK(s.S(i, j) == 0);
  Int prod = 1;
  for (std::size_t i = 0; i < k; ++i) {
    CHECK(s.S(i, i) >= 0);
    if (i + 1 < k && s.S(i, i) != 0) CHECK(s.S(i + 1, i + 1) % s.S(i, i) == 0);
    prod *= s.S(i, i);
    CHECK(prod == det_divisor(M, i + 1));
  }
}

}  // namespace

TEST_CASE("smith normal form: fixed cases") {
  auto id = smith_normal_form(IntMatrix::identity(2));
  CHECK(id.S == IntMatrix::identity(2));
  CHECK(smith_normal_form(mk(1, 1, {2})).S == mk(1, 1, {2}));
  auto c = smith_normal_form(mk(2, 1, {1, 2}));
  CHECK(c.S == mk(2, 1, {1, 0}));
  check_snf(mk(2, 1, {1, 2}));
  check_snf(mk(3, 3, {2, 4, 4, -6, 6, 12, 10, -4, -16}));
  check_snf(mk(4, 2, {1, 0, 2, 1, 1, 0, 0, 1}));
}

TEST_CASE("smith normal form: random matrices against determinantal divisors") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dist(-9, 9);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + t % 4, c = 1 + (t / 4) % 3;
    IntMatrix M(r, c);
    for (auto& x : M.a) x = dist(rng);
    check_snf(M);
  }
}

TEST_CASE("smith normal form: big entries stay exact") {
  IntMatrix M(2, 2);
  M(0, 0) = Int("123456789012345678901234567890");
  M(0, 1) = Int("98765432109876543210");
  M(1, 0) = Int("-55555555555555555555555");
  M(1, 1) = Int("777777777777777777");
  check_snf(M);
}

TEST_CASE("cokernel examples") {
  auto p1 = cokernel(mk(2, 1, {1, 1}));
  CHECK(p1.free_rank == 1);
  CHECK(p1.torsion.empty());
  // b_1 = -b_2 and b_1 generates
  auto b1 = p1.basis_image(0), b2 = p1.basis_image(1);
  CHECK(abs(b1.free[0]) == 1);
  CHECK(b1.free[0] == -b2.free[0]);

  auto p12 = cokernel(mk(2, 1, {1, 2}));
  auto c1 = p12.basis_image(0), c2 = p12.basis_image(1);
  CHECK(c1.free[0] == -2 * c2.free[0]);
  CHECK(abs(c2.free[0]) == 1);

  auto triv = cokernel(IntMatrix::identity(2));
  CHECK(triv.free_rank == 0);
  CHECK(triv.torsion.empty());

  // Z^2 / (2,2) = Z + Z/2
  auto t = cokernel(mk(2, 1, {2, 2}));
  CHECK(t.free_rank == 1);
  REQUIRE(t.torsion.size() == 1);
  CHECK(t.torsion[0] == 2);
  CHECK(t.represent({Int(2), Int(2)}).is_zero());
  CHECK(!t.represent({Int(1), Int(1)}).is_zero());

  CHECK_THROWS_AS(cokernel(mk(3, 2, {1, 2, 2, 4, 3, 6})), Error);
}

TEST_CASE("cokernel kernel is exactly the image") {
  IntMatrix M = mk(4, 2, {1, 0, 2, 1, 1, 0, 0, 1});
  auto G = cokernel(M);
  for (std::size_t j = 0; j < 2; ++j) CHECK(G.represent(M.col(j)).is_zero());
  // brute force: x in small box with represent(x)=0 must lie in the rational image with integer coefficients
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          IntVec x{a, b, c, d};
          bool zero = G.represent(x).is_zero();
          // image: x = u*(1,2,1,0) + v*(0,1,0,1)
          bool in_img = (a == c) && (b == 2 * a + d);
          CHECK(zero == in_img);
        }
}

TEST_CASE("cone membership") {
  RationalCone c{1, {{Rat(1)}, {Rat(2)}}};
  auto s = cone_contains(c, {Rat(1)}, true);
  REQUIRE(s);
  CHECK((*s)[0] > 0);
  CHECK((*s)[1] > 0);
  CHECK((*s)[0] + 2 * (*s)[1] == 1);

  RationalCone q{2, {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}};
  CHECK(!cone_contains(q, {Rat(-1), Rat(0)}, false));
  CHECK(!cone_contains(q, {Rat(-1), Rat(0)}, true));
  CHECK(cone_contains(q, {Rat(1), Rat(0)}, false));
  CHECK(!cone_contains(q, {Rat(1), Rat(0)}, true));

  RationalCone ray{1, {{Rat(1)}}};
  auto z = cone_contains(ray, {Rat(0)}, false);
  REQUIRE(z);
  CHECK((*z)[0] == 0);
  CHECK(!cone_contains(ray, {Rat(0)}, true));

  // strict implies non-strict on a sample grid
  RationalCone t{2, {{Rat(1), Rat(0)}, {Rat(1), Rat(3)}, {Rat(0), Rat(1)}}};
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      RatVec x{Rat(a), Rat(b)};
      if (cone_contains(t, x, true)) CHECK(cone_contains(t, x, false));
    }
}

TEST_CASE("rational helpers") {
  RatMatrix A(2, 2);
  A(0, 0) = 2; A(0, 1) = 1; A(1, 0) = 1; A(1, 1) = 1;
  CHECK(det(A) == 1);
  auto x = solve_square(A, {Rat(3), Rat(2)});
  REQUIRE(x);
  CHECK((*x)[0] == 1);
  CHECK((*x)[1] == 1);
  RatMatrix B(1, 3);
  B(0, 0) = 1; B(0, 1) = 1; B(0, 2) = 1;
  CHECK(nullspace(B).size() == 2);
  CHECK(rank(B) == 1);
}
