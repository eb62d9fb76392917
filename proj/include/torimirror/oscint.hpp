#pragma once
// Oscillatory integrals of e^{-W/z} over the real positive cycle and the compact torus.

#include "torimirror/hypergeom.hpp"
#include "torimirror/mirror_lg.hpp"

namespace tmir::oscint {

using mirror_lg::LGModel;

struct QuadratureSpec {
  int min_level = 3;  // tanh-sinh step 2^{-level}
  int max_level = 9;
  double window = 0;  // |t_i| <= window in log coordinates; 0 = automatic
  double tol = 1e-12;  // relative, for the level-doubling estimate
  int digits = 16;     // window drops e^{-W/z} below 10^{-(digits+6)}
  bool sparse_override = false;  // required for n > 3
};

struct QuadResult {
  cplx value;
  double error = 0;
  int level = 0;
  std::size_t nodes = 0;
  double window = 0;
  bool sparse = false;  // accuracy not guaranteed
  std::vector<double> level_errors;
};

// smallest cube [-T,T]^n on whose boundary W >= z (digits+6) ln 10
double choose_window(const LGModel& M, const std::vector<double>& coeff, double z, int digits);

// (2 pi i)^{-n} |N_tor|^{-1} int_{(0,inf)^n} e^{-W_q/z} dy/y, q_a > 0, z > 0; throws ToleranceUnmet
QuadResult real_thimble_integral(const LGModel& M, const std::vector<double>& q, double z, const QuadratureSpec& spec,
                                 bool parallel = true);

// (2 pi i)^{-n} |N_tor|^{-1} sum over components of the torus integral; trapezoid rule with `nodes` per axis
cplx compact_cycle_integral(const LGModel& M, const std::vector<cplx>& logq, cplx z, std::size_t nodes,
                            bool parallel = true);

// residue series summed until the last shells are negligible
struct ResidueValue {
  cplx value;
  double tail = 0;
  long order = 0;
};
ResidueValue residue_value(const stack::InertiaData& X, const LGModel& M, const std::vector<cplx>& logq, cplx z);

struct Conventions {
  std::string kernel = "exp(-W/z)";
  std::string rotation = "H(q, e^{+pi i} z), log z real";
  std::string omega = "|N_tor|^{-1} prod dy_j/y_j on each component";
  std::string normalization = "(2 pi i)^{-n}";
  std::string orientation = "positive real locus, standard orientation of (0,inf)^n";
};

struct IdentityReport {
  Conventions conventions;
  // structure sheaf: real thimble against Z(O_X)
  cplx thimble, z_structure;
  double thimble_error = 0, str_rel = 0;
  // skyscraper: compact cycle against the residue series and Z(O_pt)
  cplx compact, residue, z_point;
  double residue_tail = 0, sky_rel_residue = 0, sky_rel_point = 0;
  double h_tail = 0;
  bool pass_str = false, pass_sky = false;
  bool pass() const { return pass_str && pass_sky; }
};

IdentityReport verify_mirror_identities(const hypergeom::Hypergeom& G, const LGModel& M, const std::vector<double>& q,
                                        double z, const Rat& cap, double tol, const QuadratureSpec& spec = {});

}  // namespace tmir::oscint
