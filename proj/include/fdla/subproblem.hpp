#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>

#include "fdla/graph.hpp"
#include "fdla/spectral.hpp"

namespace fdla {

/// One agent's primal update:
///
///   minimize  (1/n)||W - J|| + a^T(W1 - 1) + b^T(W^T1 - 1) + tr(W^T M)
///             + rho/2 [ ||W1 - 1||^2 + ||W^T1 - 1||^2 + sum_j ||W - anchor_j||_F^2 ]
///   over      W with W(agent, j) = 0 for every j outside N_agent.
///
/// anchors[k] belongs to neighbors(agent)[k] (the agent itself included).
struct PrimalInstance {
  int agent = 0;
  std::reference_wrapper<const Graph> graph;
  Vector a;
  Vector b;
  Matrix m;
  std::vector<Matrix> anchors;
  double rho = 1.0 / 16.0;

  int n() const { return graph.get().size(); }
};

struct SolveReport {
  Matrix w;
  int inner_iterations = 0;
  double fixed_point_residual = 0.0;
  bool converged = false;
  /// Splitting state at exit; pass back as the warm start of the next solve.
  Matrix warm;
  /// Fixed-point residual per inner iteration (only when requested).
  std::vector<double> residual_trace;
};

struct PrimalOptions {
  double tol = 1e-8;
  int max_inner = 50'000;
  bool record_trace = false;
};

/// Objective value of inst at w (support is not checked).
double primal_objective(const PrimalInstance& inst, const Matrix& w);

/// Gradient of the smooth part (everything except (1/n)||W - J||).
Matrix smooth_gradient(const PrimalInstance& inst, const Matrix& w);

/// Douglas–Rachford splitting between f(W) = (1/n)||W - J|| and
/// h(W) = smooth part + indicator of the row support. prox of h is an exact
/// linear solve whose Cholesky factor depends only on (graph, agent, rho), so
/// one solver per agent is built once and reused every outer round.
class PrimalSolver {
 public:
  PrimalSolver(const Graph& g, int agent, double rho);

  SolveReport solve(const PrimalInstance& inst, const PrimalOptions& opts,
                    const std::optional<Matrix>& warm = std::nullopt) const;

  int agent() const { return agent_; }
  double rho() const { return rho_; }
  double step() const { return gamma_; }

 private:
  Matrix prox_smooth(const PrimalInstance& inst, const Matrix& anchor_sum,
                     const Matrix& v) const;

  int n_;
  int agent_;
  int neighbor_count_;
  double rho_;
  double gamma_;
  std::vector<Eigen::Index> free_;  // column-major indices of free entries
  Eigen::LLT<Matrix> factor_;
};

/// Stateless convenience wrapper: builds a PrimalSolver and runs it.
SolveReport solve_primal(const PrimalInstance& inst, double tol_sub = 1e-8,
                         int max_inner = 50'000,
                         const std::optional<Matrix>& warm = std::nullopt);

/// First-order optimality certificate at w: the smallest
/// ||P_S(G + grad_smooth(w))||_F over subgradients G of (1/n)||W - J|| built
/// from the top singular subspace of w - J (singular values within
/// cluster_tol of the largest). P_S zeroes entries outside the support.
double optimality_residual(const PrimalInstance& inst, const Matrix& w,
                           double cluster_tol = 1e-6);

}  // namespace fdla
