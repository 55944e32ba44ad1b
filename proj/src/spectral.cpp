#include "fdla/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdla {

Matrix averaging_matrix(int n) { return Matrix::Constant(n, n, 1.0 / n); }

double frobenius_norm(const Matrix& a) { return a.norm(); }

namespace {

PowerIterationResult run_power(const Matrix& ata, Vector v, double tol, int max_iter,
                               int& used) {
  PowerIterationResult out;
  double lambda = 0.0;
  for (; used < max_iter; ++used) {
    Vector w = ata * v;
    lambda = v.dot(w);
    double wn = w.norm();
    if (wn == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    double residual = (w - lambda * v).norm();
    v = w / wn;
    if (residual <= tol * lambda) {
      ++used;
      out.converged = true;
      break;
    }
  }
  out.value = std::sqrt(std::max(lambda, 0.0));
  return out;
}

}  // namespace

PowerIterationResult power_spectral_norm(const Matrix& a, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("power_spectral_norm: tol must be positive");
  const Eigen::Index n = a.cols();
  PowerIterationResult res;
  if (n == 0) {
    res.converged = true;
    return res;
  }
  const double fro2 = a.squaredNorm();
  if (fro2 == 0.0) {
    res.converged = true;
    return res;
  }
  const Matrix ata = a.transpose() * a;
  int used = 0;

  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double rq = v.dot(ata * v);
  if (rq <= 1e-14 * fro2) {
    // All-ones start is (numerically) annihilated, e.g. A = W - J with W1 = 1.
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    v.normalize();
  }
  res = run_power(ata, v, tol, max_iter, used);
  res.iterations = used;
  return res;
}

double spectral_norm(const Matrix& a, double tol) {
  auto est = power_spectral_norm(a, tol);
  if (est.converged) return est.value;
  return max_singular_value(a);
}

double max_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> solver(a);
  return solver.singularValues()(0);
}

RadiusEstimate spectral_radius(const Matrix& a, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_radius: tol must be positive");
  RadiusEstimate out;
  if (a.size() == 0) return out;
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_radius: matrix not square");

  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return out;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-15 * scale) {
    out.value = spectral_norm(a, tol);
    return out;
  }

  constexpr int kMaxSquarings = 40;
  Matrix b = a;
  double nb = b.norm();
  b /= nb;
  double log_prev = std::log(nb);  // log ||A^{2^m}||_F
  double estimate = -1.0;
  for (int m = 0; m < kMaxSquarings; ++m) {
    Matrix b2 = b * b;
    double n2 = b2.norm();
    out.squarings = m + 1;
    if (n2 == 0.0 || !std::isfinite(n2)) {
      // A^{2^{m+1}} vanished: nilpotent, every eigenvalue is zero.
      out.value = 0.0;
      return out;
    }
    double log_next = 2.0 * log_prev + std::log(n2);
    double next = std::exp((log_next - log_prev) / std::ldexp(1.0, m));
    b = b2 / n2;
    log_prev = log_next;
    if (estimate >= 0.0 && std::abs(next - estimate) <= tol * std::max(next, 1e-300)) {
      out.value = next;
      return out;
    }
    estimate = next;
  }
  out.value = estimate;
  out.low_confidence = true;
  return out;
}

Svd svd(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("project_l1_ball: negative radius");
  Vector mag = v.cwiseAbs();
  if (mag.sum() <= radius) return v;

  std::vector<double> sorted(mag.data(), mag.data() + mag.size());
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (sorted[k] > candidate) theta = candidate;
    else break;
  }
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double shrunk = std::max(mag(i) - theta, 0.0);
    out(i) = v(i) < 0.0 ? -shrunk : shrunk;
  }
  return out;
}

Matrix project_nuclear_ball(const Matrix& x, double radius) {
  Svd d = svd(x);
  Vector s = project_l1_ball(d.singular_values, radius);
  const Eigen::Index r = s.size();
  return d.u.leftCols(r) * s.asDiagonal() * d.v.leftCols(r).transpose();
}

Matrix prox_spectral_norm(const Matrix& x, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("prox_spectral_norm: lambda must be positive");
  return x - lambda * project_nuclear_ball(x / lambda, 1.0);
}

Matrix project_unit_sums(const Matrix& w) {
  const Eigen::Index n = w.rows();
  const double nd = static_cast<double>(n);
  Vector r = w.rowwise().sum() - Vector::Ones(n);
  Vector c = w.colwise().sum().transpose() - Vector::Ones(n);
  double t = r.sum();
  Matrix out = w;
  out.colwise() -= r / nd;
  out.rowwise() -= c.transpose() / nd;
  out.array() += t / (nd * nd);
  return out;
}

Matrix restrict_to_support(const Matrix& w, const Graph& g) {
  const int n = g.size();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : g.neighbors(i)) out(i, j) = w(i, j);
  return out;
}

Matrix project_feasible(const Matrix& w, const Graph& g, double tol, int max_iter) {
  const int n = g.size();
  if (w.rows() != n || w.cols() != n)
    throw std::invalid_argument("project_feasible: dimension mismatch");
  if (!g.is_connected()) throw std::invalid_argument("project_feasible: graph not connected");

  Matrix x = restrict_to_support(w, g);
  Matrix p = Matrix::Zero(n, n);
  Matrix q = Matrix::Zero(n, n);
  const Vector ones = Vector::Ones(n);
  for (int it = 0; it < max_iter; ++it) {
    Matrix y = project_unit_sums(x + p);
    p += x - y;
    Matrix x_next = restrict_to_support(y + q, g);
    q += y - x_next;
    x = std::move(x_next);
    double row_err = (x * ones - ones).cwiseAbs().maxCoeff();
    double col_err = (x.transpose() * ones - ones).cwiseAbs().maxCoeff();
    if (std::max(row_err, col_err) <= tol) return x;
  }
  throw std::runtime_error("project_feasible: no convergence within iteration cap");
}

}  // namespace fdla
