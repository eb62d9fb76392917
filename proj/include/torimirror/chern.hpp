#pragma once
// K-classes through the inertia Chern character; Gamma and Todd classes, Riemann-Roch,
// Mukai pairing, the framing Psi and the Galois action.

#include <optional>

#include "torimirror/cohomology.hpp"
#include "torimirror/special.hpp"

namespace tmir::chern {

using OrbClass = std::vector<cplx>;

// Integer combination of line bundles L_xi (xi in L^vee coordinates), or a class given
// directly by its inertia Chern character.
struct KClass {
  std::map<IntVec, Int> terms;
  std::optional<OrbClass> direct;
  std::string provenance;

  static KClass line(const IntVec& xi);
  static KClass structure_sheaf(std::size_t r);
  static KClass from_tch(OrbClass value, std::string provenance);

  bool is_combination() const { return !direct.has_value(); }
  KClass operator+(const KClass& o) const;
  KClass operator-(const KClass& o) const;
  KClass scaled(const Int& c) const;
};

struct ChiResult {
  cplx value;
  Int integer;
  bool exact = false;  // computed over Q
};

class Chern {
 public:
  explicit Chern(const cohomology::Cohomology& H, int digits = special::kDefaultDigits);

  const cohomology::Cohomology& H() const { return *H_; }
  int digits() const { return digits_; }

  // e^{2 pi i f}
  static cplx phase(const Rat& f);

  OrbClass tch(const KClass& V) const;
  std::optional<std::vector<Rat>> tch_exact(const KClass& V) const;  // when all phases are +-1
  KClass tensor(const KClass& a, const KClass& b) const;
  KClass dual(const KClass& a) const;

  const OrbClass& gamma_class() const;
  const OrbClass& todd_class() const;
  std::optional<std::vector<Rat>> todd_exact() const;

  ChiResult chi(const KClass& V, double tol = 1e-8) const;  // throws NonIntegerChi
  ChiResult mukai_pairing(const KClass& V1, const KClass& V2) const;
  OrbClass psi(const KClass& V) const;
  cplx sol_pairing(const KClass& V1, const KClass& V2) const;

  OrbClass galois_dG(const IntVec& xi, const OrbClass& a) const;
  OrbClass galois_G(const IntVec& xi, const OrbClass& tau) const;

  double gamma_todd_identity_check(std::size_t v, std::size_t order) const;

  // skyscrapers
  KClass point() const;  // O_x at a generic point
  // characters of Aut of the torus fixed point for max anticone I, as representatives in L^vee
  std::vector<IntVec> aut_characters(stack::Subset I) const;
  // O_y (x) chi_xi at the fixed point of the cone complementary to I, via the Koszul resolution
  KClass fixed_point_skyscraper(stack::Subset I, const IntVec& xi) const;

  // exp(xi-bar) * e^{2 pi i f_v(xi)} on sector v, generic scalar type
  template <class T>
  std::vector<T> line_tch_local(std::size_t v, const IntVec& xi) const;

 private:
  template <class T>
  std::optional<std::vector<T>> todd_generic() const;
  template <class T>
  std::optional<std::vector<T>> tch_generic(const KClass& V) const;

  const cohomology::Cohomology* H_;
  int digits_;
  mutable std::optional<OrbClass> gamma_, todd_;
};

}  // namespace tmir::chern
