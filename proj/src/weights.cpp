#include "fdla/weights.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fdla {

WeightMatrix::WeightMatrix(Graph support, Matrix values)
    : support_(std::move(support)), values_(std::move(values)) {
  const int n = support_.size();
  if (values_.rows() != n || values_.cols() != n)
    throw std::invalid_argument("weight matrix: dimension does not match graph");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (values_(i, j) != 0.0 && !support_.has_edge(i, j))
        throw std::invalid_argument("weight matrix: nonzero entry (" + std::to_string(i + 1) +
                                    "," + std::to_string(j + 1) + ") outside the graph");
}

WeightMatrix metropolis(const Graph& g) {
  if (!g.is_connected()) throw std::invalid_argument("metropolis: graph not connected");
  const int n = g.size();
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.neighbors(i)) {
      if (j == i) continue;
      w(i, j) = std::min(1.0 / (1.0 + g.degree(i)), 1.0 / (1.0 + g.degree(j)));
      off += w(i, j);
    }
    w(i, i) = 1.0 - off;
  }
  return WeightMatrix(g, std::move(w));
}

ConsensusReport check_consensus_condition(const Matrix& w, double tol) {
  const Eigen::Index n = w.rows();
  const Vector ones = Vector::Ones(n);
  ConsensusReport rep;
  rep.row_residual = (w * ones - ones).norm();
  rep.col_residual = (w.transpose() * ones - ones).norm();
  rep.row_ok = rep.row_residual <= tol;
  rep.col_ok = rep.col_residual <= tol;
  auto rho = spectral_radius(w - averaging_matrix(static_cast<int>(n)), 1e-12);
  rep.rho_value = rho.value;
  rep.rho_low_confidence = rho.low_confidence;
  rep.rho_ok = rho.value < 1.0 - tol;
  return rep;
}

double convergence_factor(const Matrix& w) {
  return max_singular_value(w - averaging_matrix(static_cast<int>(w.rows())));
}

bool is_primitive(const Matrix& w) {
  if ((w.array() < 0.0).any())
    throw std::invalid_argument("is_primitive: matrix has negative entries");
  const Eigen::Index n = w.rows();
  if (n == 0) return false;
  Matrix power = w;
  for (Eigen::Index k = 1; k < std::max<Eigen::Index>(n - 1, 1); ++k) power = power * w;
  return (power.array() > 1e-14).all();
}

WeightMatrix assemble_from_rows(const std::vector<Vector>& rows, const Graph& g) {
  const int n = g.size();
  if (static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("assemble_from_rows: need one row per agent");
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("assemble_from_rows: row length");
    w.row(i) = rows[i].transpose();
  }
  return WeightMatrix(g, std::move(w));
}

}  // namespace fdla
