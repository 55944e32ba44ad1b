#pragma once

#include <Eigen/Dense>

#include "fdla/graph.hpp"

namespace fdla {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// J = 11^T / n.
Matrix averaging_matrix(int n);

double frobenius_norm(const Matrix& a);

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on A^T A.
///
/// Starts from the normalised all-ones vector; if that start lies in the
/// (numerical) null space of A, one deterministic perturbed restart is made.
/// Converged means the Rayleigh residual is below tol times the estimate.
PowerIterationResult power_spectral_norm(const Matrix& a, double tol, int max_iter = 20000);

/// ||A||_2. Power iteration, falling back to a full SVD when it does not
/// converge within the iteration cap.
double spectral_norm(const Matrix& a, double tol = 1e-12);

/// Largest singular value from a full SVD.
double max_singular_value(const Matrix& a);

struct RadiusEstimate {
  double value = 0.0;
  int squarings = 0;
  bool low_confidence = false;
};

/// Spectral radius rho(A).
///
/// Symmetric input goes through spectral_norm. Otherwise A is repeatedly
/// squared (renormalising every step) and rho is read off the growth ratio
/// ||A^{2k}||_F / ||A^k||_F with k = 2^m, until the relative change drops
/// below tol. After 40 squarings the last estimate is returned flagged
/// low_confidence.
RadiusEstimate spectral_radius(const Matrix& a, double tol = 1e-12);

struct Svd {
  Matrix u;
  Vector singular_values;  // descending
  Matrix v;
};

/// A = U diag(s) V^T with orthonormal U, V.
Svd svd(const Matrix& a);

/// Euclidean projection of v onto {x : ||x||_1 <= radius} (sort-and-threshold).
Vector project_l1_ball(const Vector& v, double radius);

/// Projection onto {X : ||X||_* <= radius}.
Matrix project_nuclear_ball(const Matrix& x, double radius);

/// argmin_W 1/2 ||W - X||_F^2 + lambda ||W||_2, via the Moreau decomposition
/// X - lambda * Pi_nuc(X / lambda).
Matrix prox_spectral_norm(const Matrix& x, double lambda);

/// Frobenius projection onto {W : W1 = 1, W^T 1 = 1, W_ij = 0 for (i,j) not in E}
/// by Dykstra's alternating projections. Off-support entries of the result are
/// exact zeros and the row/column sum residual is at most tol (max-abs).
/// Throws std::runtime_error if the cap is hit.
Matrix project_feasible(const Matrix& w, const Graph& g, double tol = 1e-12,
                        int max_iter = 2'000'000);

/// Closed-form projection onto {W : W1 = 1, W^T 1 = 1} (no support constraint).
Matrix project_unit_sums(const Matrix& w);

/// Zeroes the entries of w outside the support of g.
Matrix restrict_to_support(const Matrix& w, const Graph& g);

}  // namespace fdla
