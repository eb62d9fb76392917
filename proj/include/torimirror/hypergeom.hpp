#pragma once
// I-function, mirror map, GKZ operators, H-function and central charges.

#include "torimirror/chern.hpp"

namespace tmir::hypergeom {

using Laurent = std::map<int, RatVec>;  // z^k -> coefficients over the sector basis

struct QTerm {
  RatVec d;
  std::size_t sector = 0;
  Laurent c;
};

// sum_d q^d c_d(z), with the prefactor exp(sum_a pbar_a log q_a / z) kept symbolic
struct QSeries {
  Rat cap;
  Rat certified;  // coefficients with |d| <= certified are exact
  std::vector<QTerm> terms;  // sorted by (|d|, d)
  const QTerm* find(const RatVec& d) const;
};

struct MirrorMapTerm {
  RatVec d;
  std::size_t sector;
  RatVec value;  // z^{-1} coefficient on the sector
  std::string kind;  // "extra" for d = D_j^vee, otherwise "hot"
  std::size_t j = 0;
};
struct MirrorMap {
  Rat cap;
  std::vector<MirrorMapTerm> terms;  // beyond sum_a log q_a pbar_a
  bool pure_log() const { return terms.empty(); }
};

struct GKZReport {
  IntVec d;
  Rat certified;
  bool zero = true;
  std::string first_nonzero;
};

struct AsymptoticsReport {
  std::size_t sector;
  RatVec delta;
  bool leading_ok = false;
  bool no_negative_terms = false;
};

struct HValue {
  chern::OrbClass value;
  double tail_estimate = 0;
  bool truncation_warning = false;
  std::size_t terms = 0;
};

struct MonodromyReport {
  double max_coeff_error = 0;  // phases from d against phases from f_v(xi)
  double max_value_error = 0;  // continued evaluation against the Galois action
};

struct Options {
  double q_domain = 0.1;          // |q_a| bound for numeric evaluation
  double tail_tolerance = 1e-10;  // relative, triggers the truncation warning
};

class Hypergeom {
 public:
  Hypergeom(const chern::Chern& C, Options opt = {});

  const chern::Chern& chern() const { return *C_; }
  const cohomology::Cohomology& H() const { return C_->H(); }
  const stack::InertiaData& X() const { return H().X(); }
  const stack::NefBasis& B() const { return H().basis(); }

  // Box_d for any d in K (zero classes for d outside K_eff)
  Laurent box_coefficient(const RatVec& d) const;
  Rat homogeneity_defect(const QTerm& t, int zpow, std::size_t k) const;

  QSeries i_function(const Rat& cap) const;  // throws NotWeakFano
  // verifies that d in K \ K_eff with p-coordinates in [-1, cap] give zero coefficients
  bool verify_dropped_terms(const Rat& cap) const;
  MirrorMap mirror_map(const Rat& cap) const;
  RatVec frak_D(std::size_t j, std::size_t* sector) const;

  // P_d applied through the conjugation rule
  QSeries gkz_apply(const IntVec& d, const QSeries& S) const;
  std::vector<IntVec> gkz_generators() const;
  std::vector<GKZReport> gkz_annihilation_check(const std::vector<IntVec>& gens, const Rat& cap) const;
  std::vector<AsymptoticsReport> derivative_asymptotics_check() const;

  // numeric evaluation, log q given explicitly
  chern::OrbClass i_eval(const QSeries& I, const std::vector<cplx>& logq, cplx z) const;
  HValue h_function_eval(const std::vector<double>& q, cplx z, const Rat& cap) const;  // q > 0
  HValue h_function_eval_log(const std::vector<cplx>& logq, cplx logz, const Rat& cap) const;
  cplx central_charge(const chern::KClass& V, const std::vector<double>& q, cplx z, const Rat& cap,
                      HValue* h = nullptr) const;
  // (-1)^n i_pt^* H as an exact series in x: pairs (d, coefficient of x^d)
  std::vector<std::pair<RatVec, Rat>> point_restriction(const Rat& cap) const;

  MonodromyReport galois_monodromy_check(const IntVec& xi, const Rat& cap) const;

 private:
  // prod_i prod_{nu < counts_i} (Dbar_i + (<D_i,delta> - nu) z) * c on the given sector
  Laurent operator_factors(std::size_t sector, const RatVec& delta, const std::vector<long>& counts, const Laurent& c) const;
  Laurent lmul(std::size_t v, const Laurent& a, const Laurent& b) const;
  chern::OrbClass pbar_sum(std::size_t v, const std::vector<cplx>& coef) const;  // sum_a coef_a pbar_a on sector v
  const chern::Chern* C_;
  Options opt_;
};

}  // namespace tmir::hypergeom
