#include "fdla/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fdla {

namespace {

void validate(const PrimalInstance& inst) {
  const int n = inst.n();
  const int i = inst.agent;
  if (i < 0 || i >= n) throw std::invalid_argument("primal instance: agent out of range");
  if (!(inst.rho > 0.0)) throw std::invalid_argument("primal instance: rho must be positive");
  if (inst.a.size() != n || inst.b.size() != n || inst.m.rows() != n || inst.m.cols() != n)
    throw std::invalid_argument("primal instance: dual dimensions do not match graph");
  if (inst.anchors.size() != inst.graph.get().neighbors(i).size())
    throw std::invalid_argument("primal instance: need one anchor per neighbour (self included)");
  for (const auto& anchor : inst.anchors)
    if (anchor.rows() != n || anchor.cols() != n)
      throw std::invalid_argument("primal instance: anchor dimension mismatch");
}

Matrix sum_of(const std::vector<Matrix>& mats, int n) {
  Matrix s = Matrix::Zero(n, n);
  for (const auto& m : mats) s += m;
  return s;
}

// Projection of a vector onto the probability simplex.
Vector project_simplex(const Vector& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cumulative += s[k];
    double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (s[k] > t) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Matrix project_spectraplex(const Matrix& z) {
  Matrix sym = 0.5 * (z + z.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector lam = project_simplex(eig.eigenvalues());
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double primal_objective(const PrimalInstance& inst, const Matrix& w) {
  const int n = inst.n();
  const Vector ones = Vector::Ones(n);
  const Vector row_res = w * ones - ones;
  const Vector col_res = w.transpose() * ones - ones;
  double value = max_singular_value(w - averaging_matrix(n)) / n;
  value += inst.a.dot(row_res) + inst.b.dot(col_res) + (w.transpose() * inst.m).trace();
  double penalty = row_res.squaredNorm() + col_res.squaredNorm();
  for (const auto& anchor : inst.anchors) penalty += (w - anchor).squaredNorm();
  return value + 0.5 * inst.rho * penalty;
}

Matrix smooth_gradient(const PrimalInstance& inst, const Matrix& w) {
  const int n = inst.n();
  const Vector ones = Vector::Ones(n);
  Matrix g = inst.a * ones.transpose() + ones * inst.b.transpose() + inst.m;
  Matrix quad = (w * ones - ones) * ones.transpose() + ones * (w.transpose() * ones - ones).transpose();
  for (const auto& anchor : inst.anchors) quad += w - anchor;
  return g + inst.rho * quad;
}

PrimalSolver::PrimalSolver(const Graph& g, int agent, double rho)
    : n_(g.size()), agent_(agent), rho_(rho) {
  if (agent < 0 || agent >= n_) throw std::invalid_argument("primal solver: agent out of range");
  if (!(rho > 0.0)) throw std::invalid_argument("primal solver: rho must be positive");
  neighbor_count_ = static_cast<int>(g.neighbors(agent).size());

  // The smooth part has curvature between rho*m and rho*(m + 2n) on the
  // support; this step balances the two for the DR contraction.
  const double mu = rho * neighbor_count_;
  const double lip = rho * (neighbor_count_ + 2.0 * n_);
  gamma_ = 1.0 / std::sqrt(mu * lip);

  for (int c = 0; c < n_; ++c)
    for (int r = 0; r < n_; ++r)
      if (r != agent || g.has_edge(agent, c)) free_.push_back(r + static_cast<Eigen::Index>(c) * n_);

  const Eigen::Index f = static_cast<Eigen::Index>(free_.size());
  Matrix k(f, f);
  const double diag = mu + 1.0 / gamma_;
  for (Eigen::Index p = 0; p < f; ++p) {
    const Eigen::Index rp = free_[p] % n_, cp = free_[p] / n_;
    for (Eigen::Index q = 0; q < f; ++q) {
      const Eigen::Index rq = free_[q] % n_, cq = free_[q] / n_;
      k(p, q) = rho * ((rp == rq ? 1.0 : 0.0) + (cp == cq ? 1.0 : 0.0)) + (p == q ? diag : 0.0);
    }
  }
  factor_.compute(k);
  if (factor_.info() != Eigen::Success)
    throw std::runtime_error("primal solver: factorisation failed");
}

Matrix PrimalSolver::prox_smooth(const PrimalInstance& inst, const Matrix& anchor_sum,
                                 const Matrix& v) const {
  const int n = n_;
  const Vector ones = Vector::Ones(n);
  Matrix rhs = v / gamma_ - (inst.a * ones.transpose() + ones * inst.b.transpose() + inst.m) +
               Matrix::Constant(n, n, 2.0 * rho_) + rho_ * anchor_sum;
  const Eigen::Index f = static_cast<Eigen::Index>(free_.size());
  Vector rv(f);
  for (Eigen::Index p = 0; p < f; ++p) rv(p) = rhs.data()[free_[p]];
  Vector sol = factor_.solve(rv);
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index p = 0; p < f; ++p) out.data()[free_[p]] = sol(p);
  return out;
}

SolveReport PrimalSolver::solve(const PrimalInstance& inst, const PrimalOptions& opts,
                                const std::optional<Matrix>& warm) const {
  validate(inst);
  if (inst.agent != agent_ || inst.n() != n_ || inst.rho != rho_)
    throw std::invalid_argument("primal solver: instance does not match solver");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("primal solver: tol must be positive");

  const int n = n_;
  const Matrix j = averaging_matrix(n);
  const Matrix anchor_sum = sum_of(inst.anchors, n);
  const double lambda = gamma_ / n;

  // Default start: the agent's own previous iterate (anchor of j = agent).
  Matrix z;
  if (warm && warm->rows() == n && warm->cols() == n) {
    z = *warm;
  } else {
    const auto& nb = inst.graph.get().neighbors(agent_);
    auto self = std::lower_bound(nb.begin(), nb.end(), agent_) - nb.begin();
    z = inst.anchors[static_cast<std::size_t>(self)];
  }

  SolveReport rep;
  Matrix x;
  for (int it = 0; it < opts.max_inner; ++it) {
    x = prox_smooth(inst, anchor_sum, z);
    Matrix y = j + prox_spectral_norm(2.0 * x - z - j, lambda);
    Matrix step = y - x;
    z += step;
    rep.fixed_point_residual = step.norm();
    rep.inner_iterations = it + 1;
    if (opts.record_trace) rep.residual_trace.push_back(rep.fixed_point_residual);
    if (rep.fixed_point_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  if (rep.inner_iterations == 0) x = prox_smooth(inst, anchor_sum, z);
  rep.w = std::move(x);
  rep.warm = std::move(z);
  return rep;
}

SolveReport solve_primal(const PrimalInstance& inst, double tol_sub, int max_inner,
                         const std::optional<Matrix>& warm) {
  PrimalSolver solver(inst.graph.get(), inst.agent, inst.rho);
  return solver.solve(inst, {tol_sub, max_inner, false}, warm);
}

double optimality_residual(const PrimalInstance& inst, const Matrix& w, double cluster_tol) {
  validate(inst);
  const int n = inst.n();
  const Graph& g = inst.graph.get();
  const Matrix grad = smooth_gradient(inst, w);
  const double nd = static_cast<double>(n);
  auto masked = [&](const Matrix& m) {
    Matrix out = m;
    for (int c = 0; c < n; ++c)
      if (!g.has_edge(inst.agent, c)) out(inst.agent, c) = 0.0;
    return out;
  };

  const Svd d = svd(w - averaging_matrix(n));
  const double sigma1 = d.singular_values(0);
  constexpr int kIters = 4000;
  const double step = nd * nd / 2.0;

  if (sigma1 <= cluster_tol) {
    // Subdifferential at W = J is the whole nuclear unit ball (scaled by 1/n).
    Matrix z = Matrix::Zero(n, n), z_prev = z, y = z;
    double t = 1.0;
    for (int it = 0; it < kIters; ++it) {
      Matrix gz = (2.0 / nd) * masked(y / nd + grad);
      z = project_nuclear_ball(y - step * gz, 1.0);
      double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = z + ((t - 1.0) / t_next) * (z - z_prev);
      z_prev = z;
      t = t_next;
    }
    return masked(z / nd + grad).norm();
  }

  Eigen::Index r = 1;
  while (r < d.singular_values.size() && d.singular_values(r) >= sigma1 - cluster_tol) ++r;
  const Matrix u1 = d.u.leftCols(r);
  const Matrix v1 = d.v.leftCols(r);
  Matrix z = Matrix::Identity(r, r) / static_cast<double>(r), z_prev = z, y = z;
  double t = 1.0;
  for (int it = 0; it < kIters; ++it) {
    Matrix inner = masked(u1 * y * v1.transpose() / nd + grad);
    Matrix gz = (2.0 / nd) * (u1.transpose() * inner * v1);
    z = project_spectraplex(y - step * 0.5 * (gz + gz.transpose()));
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / t_next) * (z - z_prev);
    z_prev = z;
    t = t_next;
  }
  return masked(u1 * z * v1.transpose() / nd + grad).norm();
}

}  // namespace fdla
