#pragma once

#include <vector>

#include "fdla/graph.hpp"
#include "fdla/spectral.hpp"

namespace fdla {

/// A weight matrix together with the topology it conforms to.
/// Invariant: values(i, j) == 0 exactly whenever (i, j) is not an edge.
class WeightMatrix {
 public:
  WeightMatrix(Graph support, Matrix values);

  const Graph& support() const { return support_; }
  const Matrix& values() const { return values_; }
  int size() const { return support_.size(); }

 private:
  Graph support_;
  Matrix values_;
};

/// Local-degree (Metropolis) weights: min{1/(1+d_i), 1/(1+d_j)} on edges,
/// self-weight completes the row sum. Rejects disconnected graphs.
WeightMatrix metropolis(const Graph& g);

struct ConsensusReport {
  bool row_ok = false;
  bool col_ok = false;
  double row_residual = 0.0;  // ||W1 - 1||
  double col_residual = 0.0;  // ||W^T 1 - 1||
  double rho_value = 0.0;     // rho(W - J)
  bool rho_ok = false;        // rho_value < 1 - tol
  bool rho_low_confidence = false;

  bool ok() const { return row_ok && col_ok && rho_ok; }
};

ConsensusReport check_consensus_condition(const Matrix& w, double tol);

/// Per-step convergence factor ||W - J||_2 (largest singular value).
double convergence_factor(const Matrix& w);

/// true iff W^{n-1} > 1e-14 entrywise. W must be nonnegative.
bool is_primitive(const Matrix& w);

/// Stacks the given rows (row i from rows[i]) and checks the support.
WeightMatrix assemble_from_rows(const std::vector<Vector>& rows, const Graph& g);

}  // namespace fdla
