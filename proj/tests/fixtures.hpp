#pragma once
// Example initial data shared by unit and acceptance tests.

#include "torimirror/stack.hpp"

namespace fx {

using tmir::IntMatrix;
using tmir::Rat;
using tmir::stack::StackInitialData;

inline StackInitialData make(std::size_t r, std::vector<std::vector<long>> rows, std::vector<Rat> eta) {
  StackInitialData s;
  s.r = r;
  s.D = IntMatrix(rows.size(), r);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < r; ++j) s.D(i, j) = rows[i][j];
  s.eta = std::move(eta);
  return s;
}

inline StackInitialData P1() { return make(1, {{1}, {1}}, {1}); }
inline StackInitialData P2() { return make(1, {{1}, {1}, {1}}, {1}); }
inline StackInitialData P12() { return make(1, {{1}, {2}}, {1}); }
inline StackInitialData P112() { return make(1, {{1}, {2}, {1}}, {1}); }
inline StackInitialData P1xP1() { return make(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}}, {1, 1}); }
// P(1,1,2) with the extra age-1 ray b4 = (b1+b3)/2
inline StackInitialData P112ext() { return make(2, {{1, 0}, {2, 1}, {1, 0}, {0, 1}}, {1, 1}); }
inline StackInitialData F3() { return make(2, {{1, 0}, {1, 3}, {0, 1}, {0, 1}}, {1, 4}); }

}  // namespace fx

#include <memory>

#include "torimirror/cohomology.hpp"

namespace fx {

inline StackInitialData P123() { return make(1, {{1}, {2}, {3}}, {1}); }

struct Setup {
  tmir::stack::InertiaData X;
  tmir::stack::NefBasis B;
  std::unique_ptr<tmir::cohomology::Cohomology> H;
  explicit Setup(const StackInitialData& d, bool weak_fano = false)
      : X(tmir::stack::validate(d)), B(tmir::stack::select_nef_basis(X, std::nullopt, weak_fano)) {
    H = std::make_unique<tmir::cohomology::Cohomology>(X, B);
  }
};

}  // namespace fx
