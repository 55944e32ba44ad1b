#include "fdla/admm.hpp"

#include <algorithm>
#include <cmath>

namespace fdla {

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("admm: rho must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("admm: epsilon must be positive");
  if (max_outer < 0) throw std::invalid_argument("admm: max_outer must be nonnegative");
  if (!(tol_sub > 0.0)) throw std::invalid_argument("admm: tol_sub must be positive");
}

SubproblemError::SubproblemError(int agent, int round, double residual)
    : std::runtime_error("primal update of agent " + std::to_string(agent + 1) + " in round " +
                         std::to_string(round) + " stalled at residual " +
                         std::to_string(residual)),
      agent_(agent),
      round_(round) {}

double ResidualReport::max_r3() const {
  double m = 0.0;
  for (auto [j, v] : r3) m = std::max(m, v);
  return m;
}

std::vector<AgentState> zero_states(int n) {
  std::vector<AgentState> out(n);
  for (auto& s : out) {
    s.w = Matrix::Zero(n, n);
    s.a = Vector::Zero(n);
    s.b = Vector::Zero(n);
    s.m = Matrix::Zero(n, n);
    s.warm = Matrix::Zero(n, n);
  }
  return out;
}

PrimalInstance parallel_instance(std::span<const AgentState> states, const Graph& g, double rho,
                                 int agent) {
  const AgentState& self = states[agent];
  PrimalInstance inst{agent, std::cref(g), self.a, self.b, self.m, {}, rho};
  for (int j : g.neighbors(agent)) inst.anchors.push_back(0.5 * (self.w + states[j].w));
  return inst;
}

ResidualReport residuals(int agent, std::span<const AgentState> states, const Graph& g) {
  const int n = g.size();
  const double nd = static_cast<double>(n);
  const Matrix& w = states[agent].w;
  const Vector ones = Vector::Ones(n);
  ResidualReport rep;
  rep.r1 = (w * ones - ones).norm() / std::sqrt(nd);
  rep.r2 = (w.transpose() * ones - ones).norm() / std::sqrt(nd);
  rep.max_residual = std::max(rep.r1, rep.r2);
  for (int j = 0; j < n; ++j) {
    if (j == agent) continue;
    if (g.has_edge(agent, j)) {
      double v = (w - states[j].w).norm() / nd;
      rep.r3.emplace_back(j, v);
      rep.max_residual = std::max(rep.max_residual, v);
    } else {
      double v = std::abs(w(agent, j));
      rep.r4.emplace_back(j, v);
      rep.max_residual = std::max(rep.max_residual, v);
    }
  }
  return rep;
}

bool stopping_satisfied(std::span<const ResidualReport> reports, double epsilon) {
  return std::all_of(reports.begin(), reports.end(),
                     [epsilon](const ResidualReport& r) { return r.max_residual <= epsilon; });
}

namespace {

std::vector<PrimalSolver> build_solvers(const Graph& g, double rho) {
  std::vector<PrimalSolver> out;
  out.reserve(g.size());
  for (int i = 0; i < g.size(); ++i) out.emplace_back(g, i, rho);
  return out;
}

void check_states(std::span<const AgentState> states, const Graph& g) {
  const int n = g.size();
  if (static_cast<int>(states.size()) != n)
    throw std::invalid_argument("admm: need one state per agent");
  for (const auto& s : states)
    if (s.w.rows() != n || s.w.cols() != n || s.a.size() != n || s.b.size() != n ||
        s.m.rows() != n || s.m.cols() != n)
      throw std::invalid_argument("admm: state dimension does not match graph");
}

long long parallel_round_impl(std::vector<AgentState>& states, const Graph& g,
                              const AdmmConfig& cfg, int k,
                              const std::vector<PrimalSolver>& solvers) {
  const int n = g.size();
  const Vector ones = Vector::Ones(n);

  if (cfg.local_freeze) {
    for (int i = 0; i < n; ++i)
      states[i].frozen = residuals(i, states, g).max_residual <= cfg.epsilon;
  } else {
    for (auto& s : states) s.frozen = false;
  }

  // Primal: every agent reads round-k matrices only.
  std::vector<Matrix> next_w(n);
  long long inner = 0;
  for (int i = 0; i < n; ++i) {
    if (states[i].frozen) {
      next_w[i] = states[i].w;
      continue;
    }
    PrimalInstance inst = parallel_instance(states, g, cfg.rho, i);
    SolveReport rep = solvers[i].solve(inst, {cfg.tol_sub, cfg.max_inner, false}, states[i].warm);
    if (!rep.converged) throw SubproblemError(i, k, rep.fixed_point_residual);
    inner += rep.inner_iterations;
    next_w[i] = std::move(rep.w);
    states[i].warm = std::move(rep.warm);
  }

  // Exchange is a barrier; duals use round-(k+1) neighbour matrices.
  for (int i = 0; i < n; ++i) {
    if (states[i].frozen) continue;
    AgentState& s = states[i];
    s.a += cfg.rho * (next_w[i] * ones - ones);
    s.b += cfg.rho * (next_w[i].transpose() * ones - ones);
    for (int j : g.neighbors(i))
      if (j != i) s.m += 0.5 * cfg.rho * (next_w[i] - next_w[j]);
  }
  for (int i = 0; i < n; ++i) states[i].w = std::move(next_w[i]);
  return inner;
}

}  // namespace

AdmmEngine::AdmmEngine(Graph g, AdmmConfig cfg)
    : AdmmEngine(g, cfg, zero_states(g.size())) {}

AdmmEngine::AdmmEngine(Graph g, AdmmConfig cfg, std::vector<AgentState> initial)
    : graph_(std::move(g)), cfg_(cfg), states_(std::move(initial)) {
  cfg_.validate();
  if (!graph_.is_connected()) throw std::invalid_argument("admm: graph not connected");
  check_states(states_, graph_);
  solvers_ = build_solvers(graph_, cfg_.rho);
}

void AdmmEngine::step() {
  last_inner_ = parallel_round_impl(states_, graph_, cfg_, round_, solvers_);
  ++round_;
}

std::vector<ResidualReport> AdmmEngine::residual_reports() const {
  std::vector<ResidualReport> out;
  out.reserve(states_.size());
  for (int i = 0; i < graph_.size(); ++i) out.push_back(residuals(i, states_, graph_));
  return out;
}

std::vector<AgentState> parallel_round(std::span<const AgentState> states, const Graph& g,
                                       const AdmmConfig& cfg, int k) {
  cfg.validate();
  check_states(states, g);
  std::vector<AgentState> next(states.begin(), states.end());
  parallel_round_impl(next, g, cfg, k, build_solvers(g, cfg.rho));
  return next;
}

SerialState zero_serial(const Graph& g) {
  const int n = g.size();
  SerialState s;
  s.x.resize(n);
  s.c.resize(n);
  s.d.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto deg = g.neighbors(i).size();
    s.x[i].assign(deg, Matrix::Zero(n, n));
    s.c[i].assign(deg, Matrix::Zero(n, n));
    s.d[i].assign(deg, Matrix::Zero(n, n));
  }
  return s;
}

Matrix serial_dual_sum(const SerialState& serial, int agent) {
  const auto& cs = serial.c[agent];
  Matrix sum = Matrix::Zero(cs.front().rows(), cs.front().cols());
  for (const auto& c : cs) sum += c;
  return sum;
}

PrimalInstance serial_instance(std::span<const AgentState> states, const SerialState& serial,
                               const Graph& g, double rho, int agent) {
  const AgentState& self = states[agent];
  PrimalInstance inst{agent, std::cref(g), self.a, self.b, serial_dual_sum(serial, agent),
                      serial.x[agent], rho};
  return inst;
}

std::pair<std::vector<AgentState>, SerialState> serial_round(std::span<const AgentState> states,
                                                             const SerialState& serial,
                                                             const Graph& g,
                                                             const AdmmConfig& cfg, int k) {
  cfg.validate();
  check_states(states, g);
  const int n = g.size();
  const Vector ones = Vector::Ones(n);
  const double rho = cfg.rho;
  auto solvers = build_solvers(g, rho);

  std::vector<AgentState> next(states.begin(), states.end());
  for (int i = 0; i < n; ++i) {
    PrimalInstance inst = serial_instance(states, serial, g, rho, i);
    SolveReport rep = solvers[i].solve(inst, {cfg.tol_sub, cfg.max_inner, false}, states[i].warm);
    if (!rep.converged) throw SubproblemError(i, k, rep.fixed_point_residual);
    next[i].w = std::move(rep.w);
    next[i].warm = std::move(rep.warm);
  }

  SerialState out = serial;
  for (int i = 0; i < n; ++i) {
    const auto& nb = g.neighbors(i);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      const int j = nb[p];
      out.x[i][p] = (serial.c[i][p] + serial.d[i][p]) / (2.0 * rho) + 0.5 * (next[i].w + next[j].w);
    }
  }
  for (int i = 0; i < n; ++i) {
    const auto& nb = g.neighbors(i);
    AgentState& s = next[i];
    s.a += rho * (s.w * ones - ones);
    s.b += rho * (s.w.transpose() * ones - ones);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      const int j = nb[p];
      // X_ji(k+1) equals X_ij(k+1) by the closed form above.
      out.c[i][p] += rho * (next[i].w - out.x[i][p]);
      out.d[i][p] += rho * (next[j].w - out.x[i][p]);
    }
    s.m = serial_dual_sum(out, i);
  }
  return {std::move(next), std::move(out)};
}

double augmented_lagrangian(std::span<const AgentState> states, const SerialState& serial,
                            const Graph& g, double rho) {
  check_states(states, g);
  const int n = g.size();
  const Vector ones = Vector::Ones(n);
  const Matrix j_avg = averaging_matrix(n);
  double objective = 0.0, linear = 0.0, penalty = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& s = states[i];
    const Vector row = s.w * ones - ones;
    const Vector col = s.w.transpose() * ones - ones;
    objective += max_singular_value(s.w - j_avg) / n;
    linear += s.a.dot(row) + s.b.dot(col);
    penalty += row.squaredNorm() + col.squaredNorm();
    const auto& nb = g.neighbors(i);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      const int j = nb[p];
      const Matrix di = s.w - serial.x[i][p];
      const Matrix dj = states[j].w - serial.x[i][p];
      linear += (di.transpose() * serial.c[i][p]).trace() + (dj.transpose() * serial.d[i][p]).trace();
      penalty += di.squaredNorm() + dj.squaredNorm();
    }
  }
  return objective + linear + 0.5 * rho * penalty;
}

AdmmRun run_until_stop(const Graph& g, const AdmmConfig& cfg) {
  AdmmEngine engine(g, cfg);
  const int n = g.size();
  const Matrix j_avg = averaging_matrix(n);
  AdmmRun run;

  auto record = [&](const std::vector<ResidualReport>& reps) {
    for (int i = 0; i < n; ++i) {
      const auto& r = reps[i];
      run.trace.push_back({engine.round(), i,
                           max_singular_value(engine.states()[i].w - j_avg), r.max_residual,
                           r.r1, r.r2, r.max_r3()});
    }
  };

  auto reps = engine.residual_reports();
  record(reps);
  while (!stopping_satisfied(reps, cfg.epsilon) && engine.round() < cfg.max_outer) {
    engine.step();
    run.inner_iterations += engine.last_inner_iterations();
    reps = engine.residual_reports();
    record(reps);
  }
  run.stopped = stopping_satisfied(reps, cfg.epsilon);
  run.rounds_used = engine.round();
  run.states = engine.states();
  return run;
}

}  // namespace fdla
