#include "fdla/consensus.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace fdla {

Trajectory run_protocol(const Matrix& w, const Vector& x0, int steps) {
  if (w.rows() != x0.size() || w.cols() != x0.size())
    throw std::invalid_argument("run_protocol: dimension mismatch");
  if (steps < 0) throw std::invalid_argument("run_protocol: negative horizon");
  Trajectory tr;
  tr.target = x0.mean();
  const Vector xbar = Vector::Constant(x0.size(), tr.target);
  tr.x.reserve(steps + 1);
  tr.x.push_back(x0);
  tr.error_norm.push_back((x0 - xbar).norm());
  for (int t = 0; t < steps; ++t) {
    tr.x.push_back(w * tr.x.back());
    tr.error_norm.push_back((tr.x.back() - xbar).norm());
  }
  return tr;
}

int first_crossing(std::span<const double> error_norm, double threshold, int from) {
  for (std::size_t t = static_cast<std::size_t>(std::max(from, 0)); t < error_norm.size(); ++t)
    if (error_norm[t] < threshold) return static_cast<int>(t);
  return -1;
}

Matrix build_hat_w(std::span<const AgentState> states) {
  const auto n = static_cast<Eigen::Index>(states.size());
  Matrix hat(n, n);
  for (Eigen::Index i = 0; i < n; ++i) hat.row(i) = states[i].w.row(i);
  return hat;
}

WeightMatrix symmetrize_bar_w(const Matrix& hat, const Graph& g) {
  const int n = g.size();
  if (hat.rows() != n || hat.cols() != n)
    throw std::invalid_argument("symmetrize_bar_w: dimension mismatch");
  Matrix bar = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!g.has_edge(i, j)) {
        if (hat(i, j) != 0.0)
          throw std::invalid_argument("symmetrize_bar_w: entry (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") outside the graph");
        continue;
      }
      bar(i, j) = std::min(hat(i, j), hat(j, i));
    }
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.neighbors(i))
      if (j != i) off += bar(i, j);
    bar(i, i) = 1.0 - off;
  }
  return WeightMatrix(g, std::move(bar));
}

std::vector<AgentState> metropolis_row_states(const Graph& g) {
  const int n = g.size();
  const Matrix wm = metropolis(g).values();
  auto states = zero_states(n);
  for (int i = 0; i < n; ++i) {
    states[i].w.row(i) = wm.row(i);
    states[i].warm = states[i].w;
  }
  return states;
}

namespace {

void check_events(std::span<const LiveEvent> events) {
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (events[e].t < 0) throw std::invalid_argument("live: event time must be nonnegative");
    if (e > 0 && events[e].t <= events[e - 1].t)
      throw std::invalid_argument("live: event times must be strictly increasing");
  }
}

// Shared driver: weights_at(graph, t) yields the matrix applied at step t;
// on_topology(graph) is called at start and after every arrival.
LiveRun drive(const Graph& g0, const Vector& x0, std::span<const LiveEvent> events, int steps,
              const std::function<void(const Graph&)>& on_topology,
              const std::function<Matrix(const Graph&)>& weights_at,
              const std::function<void()>& after_step) {
  if (!g0.is_connected()) throw std::invalid_argument("live: initial graph not connected");
  if (x0.size() != g0.size()) throw std::invalid_argument("live: x0 size does not match graph");
  if (steps < 0) throw std::invalid_argument("live: negative horizon");
  check_events(events);

  LiveRun run;
  Graph g = g0;
  Vector x = x0;
  double target = x.mean();
  on_topology(g);
  double cf_m = convergence_factor(metropolis(g).values());
  std::size_t next_event = 0;

  for (int t = 0; t <= steps; ++t) {
    while (next_event < events.size() && events[next_event].t == t) {
      const LiveEvent& ev = events[next_event++];
      const int added = static_cast<int>(ev.values.size());
      if (added > 0 || !ev.attach_pairs.empty()) {
        g = add_agents(g, added, ev.attach_pairs, /*require_connected=*/true);
        Vector grown(g.size());
        grown << x, Eigen::Map<const Vector>(ev.values.data(), added);
        x = std::move(grown);
        target = x.mean();
        on_topology(g);
        cf_m = convergence_factor(metropolis(g).values());
      }
    }
    run.x.push_back(x);
    run.target.push_back(target);
    run.population.push_back(g.size());
    run.error_norm.push_back((x - Vector::Constant(x.size(), target)).norm());
    if (t == steps) break;

    Matrix w = weights_at(g);
    run.cf.push_back(convergence_factor(w));
    run.cf_metropolis.push_back(cf_m);
    x = w * x;
    run.weights.push_back(std::move(w));
    after_step();
  }
  run.final_graph = g;
  return run;
}

}  // namespace

LiveRun run_admm_live(const Graph& g0, const Vector& x0, std::span<const LiveEvent> events,
                      const AdmmConfig& cfg, int steps) {
  std::optional<AdmmEngine> engine;
  return drive(
      g0, x0, events, steps,
      [&](const Graph& g) { engine.emplace(g, cfg, metropolis_row_states(g)); },
      [&](const Graph& g) { return symmetrize_bar_w(build_hat_w(engine->states()), g).values(); },
      [&] { engine->step(); });
}

LiveRun run_metropolis_live(const Graph& g0, const Vector& x0, std::span<const LiveEvent> events,
                            int steps) {
  Matrix wm;
  return drive(
      g0, x0, events, steps, [&](const Graph& g) { wm = metropolis(g).values(); },
      [&](const Graph&) { return wm; }, [] {});
}

std::vector<double> live_convergence_factor_trace(const LiveRun& run) { return run.cf; }

}  // namespace fdla
