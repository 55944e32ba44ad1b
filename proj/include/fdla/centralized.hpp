#pragma once

#include "fdla/graph.hpp"
#include "fdla/spectral.hpp"
#include "fdla/weights.hpp"

namespace fdla {

/// Centralised optimum of min ||W - J|| s.t. W1 = 1, W^T1 = 1, support(W) in E.
struct CentralSolution {
  WeightMatrix w_star;
  double factor = 0.0;       // ||W* - J||
  double certificate = 0.0;  // final fixed-point residual
  int iterations = 0;
  bool converged = false;
};

/// Douglas–Rachford between the shifted spectral-norm prox and the projection
/// onto the feasible affine set, run until the fixed-point residual is <= tol.
/// Only the optimal value is meaningful; the minimiser need not be unique.
/// Throws std::runtime_error if max_iter is reached.
CentralSolution solve_p2(const Graph& g, double tol = 1e-8, int max_iter = 2'000'000);

/// W* satisfies the consensus conditions (row/column sums, rho(W* - J) < 1).
bool verify_lemma1(const CentralSolution& sol, double tol = 1e-9);

}  // namespace fdla
