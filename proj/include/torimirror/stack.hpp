#pragma once
// Toric DM stack from initial data (r, D, eta): anticones, fan, Box, nef basis.

#include <cstdint>
#include <map>
#include <optional>

#include "torimirror/lattice.hpp"

namespace tmir::stack {

using Subset = std::uint32_t;  // bitmask over ray indices 0..m-1

inline bool has(Subset s, std::size_t i) { return (s >> i) & 1u; }
inline int popcount(Subset s) { return __builtin_popcount(s); }
std::string subset_str(Subset s);  // 1-based, e.g. "{1,3}"

struct StackInitialData {
  std::size_t r = 0;
  IntMatrix D;  // m x r, row i = D_i
  RatVec eta;
};

struct BoxSector {
  std::size_t index = 0;
  lattice::GroupElem v;
  RatVec d;           // representative, coordinates reduced into [0,1)
  Rat age;
  Subset support = 0;  // {i : <D_i,d> integral}
  int n_v = 0;
  std::size_t inv = 0;
};

struct InertiaData {
  StackInitialData data;
  std::size_t m = 0, r = 0, n = 0;
  lattice::FinAbGroup N;
  std::vector<lattice::GroupElem> b;
  std::vector<RatVec> b_free;          // free coordinates as rationals
  std::vector<char> anticone_flag;     // indexed by subset mask
  std::vector<Subset> anticones;       // sorted by (size, mask)
  std::vector<Subset> max_anticones;   // minimal anticones = complements of maximal cones
  std::vector<bool> redundant;         // ray i lies in no maximal cone
  std::size_t mprime = 0;
  std::vector<BoxSector> box;          // box[0] is the untwisted sector
  std::map<RatVec, std::size_t> box_lookup;
  std::vector<RatMatrix> max_cone_inv;  // inverse of (D_I)^T for each max anticone

  bool is_anticone(Subset s) const { return anticone_flag[s] != 0; }
  Subset full() const { return static_cast<Subset>((1u << m) - 1u); }
  Rat pair(std::size_t i, const RatVec& d) const { return dot(data.D.row(i), d); }
  Subset support_of(const RatVec& d) const;
  RatVec reduce(const RatVec& d) const;           // coordinates mod 1
  std::size_t sector_of(const RatVec& d) const;   // throws NotInK
  lattice::GroupElem v_of(const RatVec& d) const;  // sum ceil(<D_i,d>) b_i
  bool in_cl_ctilde(const RatVec& x) const;        // closure of the extended ample cone
  Int torsion_order() const { return N.torsion_order(); }
};

InertiaData validate(const StackInitialData& data);
std::vector<BoxSector> enumerate_box(const InertiaData& inertia);

struct AgeResult {
  std::size_t sector;
  lattice::GroupElem v;
  Rat age;
};
AgeResult age_of_d(const InertiaData& inertia, const RatVec& d);

struct NefBasis {
  IntMatrix P;       // r x r, row a = p_a
  RatMatrix Pinv;
  std::size_t rprime = 0;
  IntMatrix mm;      // m x r, D_i = sum_a mm(i,a) p_a
  IntVec rho;        // rho_a
  bool weak_fano_mode = false;
  bool rho_nonneg = true;
  std::map<std::size_t, RatVec> Dvee;   // j -> D_j^vee (redundant j only)
  std::map<std::size_t, RatVec> slopes;  // j -> c_{ji} over all i
  std::map<std::size_t, Subset> Ij;

  RatVec p_pairings(const RatVec& d) const;  // (<p_a,d>)_a
  Rat degree(const RatVec& d) const;          // |d| = sum_a <p_a,d>
  IntVec to_p_coords(const IntVec& xi) const;  // xi = sum_a xi_a p_a
  IntVec from_p_coords(const IntVec& xi_p) const;
};

NefBasis select_nef_basis(const InertiaData& inertia, const std::optional<IntMatrix>& user_basis,
                          bool weak_fano_mode, int height_bound = 8);

struct WeakFanoReport {
  bool rho_hat_in_cl = false;
  bool ages_ok = true;
  std::vector<std::pair<std::size_t, Rat>> extra_ages;  // (j, age(b_j))
  bool weak_fano() const { return rho_hat_in_cl; }
};
WeakFanoReport weak_fano_check(const InertiaData& inertia, const NefBasis& basis);

Rat f_of_xi(const InertiaData& inertia, const BoxSector& v, const IntVec& xi);

// d in K_eff with |d| <= cap, sorted by (|d|, lexicographic d).
std::vector<RatVec> enumerate_keff(const InertiaData& inertia, const NefBasis& basis, const Rat& cap);
Int e0(const InertiaData& inertia);

}  // namespace tmir::stack
