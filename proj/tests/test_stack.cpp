#include "doctest.h"
#include "fixtures.hpp"
#include "torimirror/stack.hpp"

using namespace tmir;
using namespace tmir::stack;

TEST_CASE("validate P1") {
  auto X = validate(fx::P1());
  CHECK(X.n == 1);
  CHECK(X.anticones == std::vector<Subset>{0b01, 0b10, 0b11});
  CHECK(X.mprime == 2);
  CHECK(X.max_anticones.size() == 2);
  CHECK(X.b[0].free[0] == -X.b[1].free[0]);
  CHECK(X.box.size() == 1);
  CHECK(X.box[0].age == 0);
}

TEST_CASE("validate P(1,2)") {
  auto X = validate(fx::P12());
  CHECK(X.N.torsion.empty());
  CHECK(X.b[0].free[0] == -2 * X.b[1].free[0]);
  REQUIRE(X.box.size() == 2);
  const auto& v = X.box[1];
  CHECK(v.age == Rat(1, 2));
  CHECK(v.n_v == 0);
  CHECK(v.inv == 1);
  CHECK(v.d == RatVec{Rat(1, 2)});
}

TEST_CASE("condition C violation is reported") {
  try {
    validate(fx::make(1, {{1}, {-1}}, {1}));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "ConditionCViolated");
  }
}

TEST_CASE("condition A violation is reported") {
  try {
    validate(fx::make(1, {{1}, {1}}, {-1}));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "ConditionAViolated");
  }
}

TEST_CASE("P(1,1,2) box") {
  auto X = validate(fx::P112());
  REQUIRE(X.box.size() == 2);
  CHECK(X.box[1].age == 1);
  CHECK(X.box[1].n_v == 0);
}

TEST_CASE("extended P(1,1,2): extra ray detected") {
  auto X = validate(fx::P112ext());
  CHECK(X.mprime == 3);
  CHECK(X.redundant[3]);
  CHECK(X.box.size() == 2);
  // the twisted sector is v = b4
  CHECK(X.box[1].v == X.b[3]);
  CHECK(X.box[1].age == 1);
}

TEST_CASE("age_of_d and quotient by L") {
  auto X = validate(fx::P12());
  auto a0 = age_of_d(X, {Rat(0)});
  CHECK(a0.sector == 0);
  CHECK(a0.age == 0);
  auto a1 = age_of_d(X, {Rat(1, 2)});
  CHECK(a1.age == Rat(1, 2));
  auto a3 = age_of_d(X, {Rat(3, 2)});
  CHECK(a3.sector == a1.sector);
  CHECK(a3.v == a1.v);
  CHECK(a3.age == Rat(1, 2));
  CHECK_THROWS_AS(age_of_d(X, {Rat(1, 3)}), Error);
}

TEST_CASE("codimension identity and inv involution") {
  for (auto data : {fx::P1(), fx::P2(), fx::P12(), fx::P112(), fx::P1xP1(), fx::P112ext(), fx::F3(),
                    fx::make(1, {{2}, {3}}, {1}), fx::make(2, {{1, 0}, {1, 2}, {0, 2}}, {1, 1})}) {
    auto X = validate(data);
    for (const auto& v : X.box) {
      const auto& w = X.box[v.inv];
      CHECK(X.box[w.index].inv == v.index);
      CHECK(v.support == w.support);
      CHECK(v.age + w.age == Rat(static_cast<long>(X.n) - v.n_v));
    }
  }
}

TEST_CASE("box count matches |K/L| via brute-force grid oracle") {
  // oracle: enumerate d in (1/60)Z^r mod 1 with support in A
  for (auto data : {fx::P12(), fx::P112(), fx::make(1, {{2}, {3}}, {1}), fx::make(2, {{1, 0}, {1, 2}, {0, 2}}, {1, 1})}) {
    auto X = validate(data);
    std::size_t count = 0;
    const long den = 12;
    if (X.r == 1) {
      for (long k = 0; k < den; ++k)
        if (X.is_anticone(X.support_of({ratio(k, den)}))) ++count;
    } else {
      for (long k = 0; k < den; ++k)
        for (long l = 0; l < den; ++l)
          if (X.is_anticone(X.support_of({ratio(k, den), ratio(l, den)}))) ++count;
    }
    CHECK(count == X.box.size());
  }
}

TEST_CASE("nef bases") {
  {
    auto X = validate(fx::P1());
    auto B = select_nef_basis(X, std::nullopt, true);
    CHECK(B.P(0, 0) == 1);
    CHECK(B.mm(0, 0) == 1);
    CHECK(B.mm(1, 0) == 1);
    CHECK(B.rho[0] == 2);
  }
  {
    auto X = validate(fx::P12());
    auto B = select_nef_basis(X, std::nullopt, true);
    CHECK(B.mm(0, 0) == 1);
    CHECK(B.mm(1, 0) == 2);
    CHECK(B.rho[0] == 3);
  }
  {
    auto X = validate(fx::P1xP1());
    auto B = select_nef_basis(X, std::nullopt, true);
    CHECK(B.P == IntMatrix::identity(2));
    CHECK(B.rho == IntVec{2, 2});
  }
  {
    auto X = validate(fx::P112ext());
    auto B = select_nef_basis(X, std::nullopt, true);
    CHECK(B.rprime == 1);
    CHECK(!B.rho_nonneg);
    REQUIRE(B.Dvee.count(3));
    const RatVec& dv = B.Dvee.at(3);
    CHECK(X.pair(3, dv) == 1);
    CHECK(X.pair(1, dv) == 0);
    CHECK(X.pair(0, dv) == Rat(-1, 2));
    CHECK(X.pair(2, dv) == Rat(-1, 2));
    auto rep = weak_fano_check(X, B);
    CHECK(rep.rho_hat_in_cl);
    REQUIRE(rep.extra_ages.size() == 1);
    CHECK(rep.extra_ages[0].second == 1);
  }
}

TEST_CASE("user basis validation") {
  auto X = validate(fx::P1xP1());
  IntMatrix bad(2, 2);
  bad(0, 0) = 1; bad(0, 1) = 0; bad(1, 0) = 0; bad(1, 1) = 2;
  CHECK_THROWS_AS(select_nef_basis(X, bad, false), Error);
  IntMatrix neg(2, 2);
  neg(0, 0) = -1; neg(1, 1) = 1;
  CHECK_THROWS_AS(select_nef_basis(X, neg, false), Error);
  CHECK_NOTHROW(select_nef_basis(X, IntMatrix::identity(2), true));
}

TEST_CASE("weak Fano check") {
  {
    auto X = validate(fx::P2());
    auto B = select_nef_basis(X, std::nullopt, false);
    CHECK(weak_fano_check(X, B).weak_fano());
  }
  {
    auto X = validate(fx::P12());
    auto B = select_nef_basis(X, std::nullopt, false);
    CHECK(weak_fano_check(X, B).weak_fano());
  }
  {
    auto X = validate(fx::F3());
    CHECK(X.max_anticones.size() == 4);
    auto B = select_nef_basis(X, std::nullopt, false);
    CHECK(!weak_fano_check(X, B).weak_fano());
    CHECK_THROWS_AS(select_nef_basis(X, std::nullopt, true), Error);
  }
}

TEST_CASE("f_of_xi") {
  auto X = validate(fx::P12());
  CHECK(f_of_xi(X, X.box[0], {Int(5)}) == 0);
  CHECK(f_of_xi(X, X.box[1], {Int(1)}) == Rat(1, 2));
  CHECK(f_of_xi(X, X.box[1], {Int(2)}) == 0);
}

TEST_CASE("enumerate K_eff") {
  {
    auto X = validate(fx::P1());
    auto B = select_nef_basis(X, std::nullopt, true);
    auto K = enumerate_keff(X, B, 2);
    CHECK(K == std::vector<RatVec>{{Rat(0)}, {Rat(1)}, {Rat(2)}});
  }
  {
    auto X = validate(fx::P12());
    auto B = select_nef_basis(X, std::nullopt, true);
    auto K = enumerate_keff(X, B, 1);
    CHECK(K == std::vector<RatVec>{{Rat(0)}, {Rat(1, 2)}, {Rat(1)}});
    CHECK(enumerate_keff(X, B, 0).size() == 1);
  }
  {
    // pairing with p_a nonnegative
    auto X = validate(fx::P112ext());
    auto B = select_nef_basis(X, std::nullopt, true);
    for (const auto& d : enumerate_keff(X, B, 3))
      for (const auto& x : B.p_pairings(d)) CHECK(x >= 0);
  }
}
