// Serial against OpenMP quadrature kernels; plain wall-clock timing.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "torimirror/oscint.hpp"
#include "torimirror/stack.hpp"

using namespace tmir;

namespace {

stack::StackInitialData make(std::size_t r, std::vector<std::vector<long>> rows, std::vector<Rat> eta) {
  stack::StackInitialData s;
  s.r = r;
  s.D = IntMatrix(rows.size(), r);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < r; ++j) s.D(i, j) = rows[i][j];
  s.eta = std::move(eta);
  return s;
}

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int k = 0; k < reps; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-34s %12s %12s %8s %12s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "|diff|");
  struct Case {
    const char* name;
    stack::StackInitialData d;
    std::vector<double> q;
  };
  // P1 x P1 x P1 gives n = 3, the largest full product grid
  for (const auto& c : {Case{"thimble P2 (n=2)", make(1, {{1}, {1}, {1}}, {1}), {0.01}},
                        Case{"thimble P1xP1 (n=2)", make(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}}, {1, 1}), {0.02, 0.03}},
                        Case{"thimble P1^3 (n=3)",
                             make(3, {{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}}, {1, 1, 1}),
                             {0.02, 0.03, 0.04}}}) {
    auto X = stack::validate(c.d);
    auto B = stack::select_nef_basis(X, std::nullopt, true);
    auto M = mirror_lg::build_lg(X, B);
    oscint::QuadratureSpec spec;
    spec.min_level = 5;
    spec.max_level = 6;
    spec.tol = 1.0;  // fixed work: two levels
    oscint::QuadResult a, b;
    double ts = best_of(3, [&] { a = oscint::real_thimble_integral(M, c.q, 1.0, spec, false); });
    double tp = best_of(3, [&] { b = oscint::real_thimble_integral(M, c.q, 1.0, spec, true); });
    std::printf("%-34s %12.4f %12.4f %8.2f %12.3g\n", c.name, ts, tp, ts / tp, std::abs(a.value - b.value));

    std::vector<cplx> lq;
    for (double x : c.q) lq.push_back(std::log(x));
    const std::size_t nodes = M.n == 3 ? 96 : 1024;
    cplx u, v;
    double cs = best_of(3, [&] { u = oscint::compact_cycle_integral(M, lq, 1.0, nodes, false); });
    double cp = best_of(3, [&] { v = oscint::compact_cycle_integral(M, lq, 1.0, nodes, true); });
    std::string nm = std::string("torus ") + (c.name + 8);
    std::printf("%-34s %12.4f %12.4f %8.2f %12.3g\n", nm.c_str(), cs, cp, cs / cp, std::abs(u - v));
  }
  return 0;
}
