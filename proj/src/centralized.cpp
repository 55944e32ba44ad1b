#include "fdla/centralized.hpp"

#include <stdexcept>

namespace fdla {

namespace {

// Projection onto {W1 = 1, W^T1 = 1, support in E} written over the support
// entries as x -> x - A^+(Ax - 1), with A stacking the 2n sum constraints.
// Tabulated once through a pseudo-inverse so the output sums are exact up to
// rounding, which the protocol's mean preservation relies on.
class FeasibleProjector {
 public:
  explicit FeasibleProjector(const Graph& g) : n_(g.size()) {
    for (int i = 0; i < n_; ++i)
      for (int j : g.neighbors(i)) support_.push_back(i + static_cast<Eigen::Index>(j) * n_);
    const auto s = static_cast<Eigen::Index>(support_.size());
    Matrix a = Matrix::Zero(2 * n_, s);
    for (Eigen::Index p = 0; p < s; ++p) {
      a(support_[p] % n_, p) = 1.0;        // row sum of row i
      a(n_ + support_[p] / n_, p) = 1.0;   // column sum of column j
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    const Matrix pinv = cod.pseudoInverse();
    map_ = Matrix::Identity(s, s) - pinv * a;
    const Vector shift = pinv * Vector::Ones(2 * n_);
    offset_ = Matrix::Zero(n_, n_);
    for (Eigen::Index p = 0; p < s; ++p) offset_.data()[support_[p]] = shift(p);
  }

  Matrix operator()(const Matrix& w) const {
    const auto s = static_cast<Eigen::Index>(support_.size());
    Vector v(s);
    for (Eigen::Index p = 0; p < s; ++p) v(p) = w.data()[support_[p]];
    Vector r = map_ * v;
    Matrix out = offset_;
    for (Eigen::Index p = 0; p < s; ++p) out.data()[support_[p]] += r(p);
    return out;
  }

 private:
  int n_;
  Matrix offset_;
  std::vector<Eigen::Index> support_;
  Matrix map_;
};

}  // namespace

CentralSolution solve_p2(const Graph& g, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_p2: tol must be positive");
  if (!g.is_connected()) throw std::invalid_argument("solve_p2: graph not connected");
  const int n = g.size();
  const Matrix j = averaging_matrix(n);
  if (n == 1) return {WeightMatrix(g, Matrix::Ones(1, 1)), 0.0, 0.0, 0, true};

  const FeasibleProjector project(g);
  constexpr double kStep = 0.5;

  Matrix z = metropolis(g).values();
  Matrix x = project(z);
  double residual = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    x = project(z);
    Matrix y = j + prox_spectral_norm(2.0 * x - z - j, kStep);
    Matrix step = y - x;
    z += step;
    residual = step.norm();
    if (residual <= tol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw std::runtime_error("solve_p2: no convergence within iteration cap");

  // Projection output: exact zeros off the support, unit sums up to rounding.
  x = project(z);
  Matrix clean = restrict_to_support(x, g);
  double factor = max_singular_value(clean - j);
  return {WeightMatrix(g, std::move(clean)), factor, residual, it, true};
}

bool verify_lemma1(const CentralSolution& sol, double tol) {
  return check_consensus_condition(sol.w_star.values(), tol).ok();
}

}  // namespace fdla
