#pragma once
// Exact integer/rational linear algebra: Smith form, cokernels, cone membership.

#include <optional>

#include "torimirror/common.hpp"

namespace tmir::lattice {

struct SmithDecomposition {
  IntMatrix U, S, V;  // M = U * S * V, U and V unimodular
};

SmithDecomposition smith_normal_form(const IntMatrix& M);

// Element of Z^n + (+)Z/t_j.
struct GroupElem {
  IntVec free;
  IntVec tors;  // reduced into [0, t_j)
  bool operator==(const GroupElem& o) const { return free == o.free && tors == o.tors; }
  bool operator<(const GroupElem& o) const {
    return free != o.free ? free < o.free : tors < o.tors;
  }
  bool is_zero() const;
};

// Cokernel of M: Z^r -> Z^m.  represent() maps ambient Z^m to the normal form.
struct FinAbGroup {
  std::size_t ambient = 0;
  std::size_t free_rank = 0;
  IntVec torsion;        // invariants t_1 | t_2 | ... , all > 1
  IntMatrix proj_free;   // free_rank x ambient
  IntMatrix proj_tors;   // torsion.size() x ambient

  GroupElem represent(const IntVec& x) const;
  GroupElem basis_image(std::size_t i) const;
  Int torsion_order() const;
};

FinAbGroup cokernel(const IntMatrix& M);

// Rational linear algebra (Gaussian elimination).
std::size_t rank(const RatMatrix& A);
std::optional<RatVec> solve_square(const RatMatrix& A, const RatVec& b);
std::optional<RatMatrix> inverse(const RatMatrix& A);
Rat det(const RatMatrix& A);
Int det(const IntMatrix& A);
std::vector<RatVec> nullspace(const RatMatrix& A);  // basis of {x : A x = 0}

// Exact simplex with Bland's rule.
// Find x >= 0 with A x = b.
std::optional<RatVec> lp_feasible(const RatMatrix& A, const RatVec& b);
// Maximize c.x subject to A x = b, x >= 0; nullopt if infeasible, throws if unbounded.
struct LPResult {
  RatVec x;
  Rat value;
};
std::optional<LPResult> lp_maximize(const RatMatrix& A, const RatVec& b, const RatVec& c);

struct RationalCone {
  std::size_t dim = 0;
  std::vector<RatVec> gens;
};

// Coefficients c (>= 0, or > 0 when strict) with sum c_k gens_k = x, if any.
std::optional<RatVec> cone_contains(const RationalCone& cone, const RatVec& x, bool strict);

}  // namespace tmir::lattice
