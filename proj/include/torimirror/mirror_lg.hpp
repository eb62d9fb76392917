#pragma once
// Landau-Ginzburg mirror W_q: Batyrev relations, critical points, Newton polytope,
// Kouchnirenko faces and the compact-cycle residue series.

#include <cstdint>

#include "torimirror/stack.hpp"

namespace tmir::mirror_lg {

struct LGModel {
  std::size_t m = 0, r = 0, n = 0;
  RatMatrix ell;            // m x r, p_a = sum_i D_i ell(i,a)
  stack::Subset support = 0;
  IntMatrix mm;             // m x r
  IntMatrix bfree;          // m x n
  IntMatrix btors;          // m x #torsion, reduced
  IntVec torsion;
  IntMatrix free_pre;       // m x n, preimages in Z^m of the free generators
  IntMatrix tors_pre;       // m x #torsion, preimages of the torsion generators

  Int ntors() const;
  std::vector<IntVec> components() const;  // characters of N_tor, component 0 = trivial
  // q^{ell_i} exp(2 pi i chi(b_i)) with principal branches of the given log q
  std::vector<cplx> coefficients(const std::vector<cplx>& logq, std::size_t component) const;
  cplx W(const std::vector<cplx>& coeff, const std::vector<cplx>& logy) const;
  std::vector<cplx> grad_log(const std::vector<cplx>& coeff, const std::vector<cplx>& logy) const;
  std::string describe() const;  // e.g. "y1 + q1*y1^-1"
};

LGModel build_lg(const stack::InertiaData& X, const stack::NefBasis& B);

// q_a = prod_i (sum_b m_ib P_b)^{m_ia}
std::vector<cplx> batyrev_q(const LGModel& M, const std::vector<cplx>& P);
std::vector<std::string> batyrev_relations(const LGModel& M);
// |q^d prod_{<D_i,d> < 0} w_i^{-<D_i,d>} - prod_{<D_i,d> > 0} w_i^{<D_i,d>}| relative
double batyrev_residual(const LGModel& M, const IntVec& d_p /* <p_a,d> */, const std::vector<cplx>& logq, const std::vector<cplx>& w);

struct CritPoint {
  std::size_t component = 0;
  std::vector<cplx> P;     // Batyrev coordinates
  std::vector<cplx> w;     // w_i at the critical point
  std::vector<cplx> logy;
  cplx value;              // W_q
  cplx hess_det;           // in log coordinates
  double residual = 0;     // |grad W| in log coordinates, relative
};

struct CriticalSet {
  std::vector<CritPoint> points;
  std::vector<std::size_t> per_component;
  std::size_t expected_per_component = 0;
  std::size_t paths = 0;
};

struct SolverOptions {
  double q_domain = 0.1;
  bool override_domain = false;
  std::uint64_t seed = 20240601;
};

// throws CountMismatch, SolverNoConvergence, OutsideSmallQDomain
CriticalSet jacobi_critical_points(const LGModel& M, const std::vector<cplx>& logq, Int expected_per_component,
                                   const SolverOptions& opt = {});

struct VolumeReport {
  Int fan_sum;        // n! Vol via maximal cones
  Rat hull_nvol;      // n! Vol via the convex hull
  Int ntors;
  std::size_t dim_orb = 0;
  bool ok() const { return Rat(fan_sum) == hull_nvol && ntors * fan_sum == Int(static_cast<long>(dim_orb)); }
};
VolumeReport volume_rank_check(const stack::InertiaData& X, const LGModel& M, std::size_t dim_orb);  // throws IdentityViolated

// exact volume of the convex hull of points in Q^n (full-dimensional)
Rat hull_volume(const std::vector<RatVec>& pts);
// proper faces of conv(b_i) as sets of point indices
std::vector<std::uint32_t> polytope_faces(const std::vector<RatVec>& pts);

struct FaceReport {
  std::size_t faces = 0;
  std::size_t starts = 0;
};
// throws DegeneracyWitness
FaceReport kouchnirenko_face_check(const LGModel& M, const std::vector<cplx>& coeff, std::size_t samples,
                                   std::uint64_t seed = 7);

struct ResidueTerm {
  IntVec k;
  RatVec qexp;  // sum_i k_i ell_i
  int zpow = 0;  // -sum k_i
  Rat coeff;
};
std::vector<ResidueTerm> residue_series(const stack::InertiaData& X, const LGModel& M, long max_total);
cplx residue_eval(const std::vector<ResidueTerm>& s, const std::vector<cplx>& logq, cplx z);

}  // namespace tmir::mirror_lg
