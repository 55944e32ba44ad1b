#pragma once

#include <span>
#include <vector>

#include "fdla/admm.hpp"
#include "fdla/graph.hpp"
#include "fdla/spectral.hpp"
#include "fdla/weights.hpp"

namespace fdla {

struct Trajectory {
  std::vector<Vector> x;            // x(0), ..., x(T)
  std::vector<double> error_norm;   // ||x(t) - x_avg(0) 1||
  double target = 0.0;              // x_avg(0)
};

/// x(t+1) = W x(t) for t = 0..T-1.
Trajectory run_protocol(const Matrix& w, const Vector& x0, int steps);

/// First t with error_norm[t] < threshold, or -1.
int first_crossing(std::span<const double> error_norm, double threshold, int from = 0);

/// Row i of agent i's estimate, stacked.
Matrix build_hat_w(std::span<const AgentState> states);

/// Off-diagonal (i,j) -> min(hat_ij, hat_ji); diagonal completes each row to 1.
/// Throws if hat is nonzero outside the support of g.
WeightMatrix symmetrize_bar_w(const Matrix& hat, const Graph& g);

/// Live-mode initial states: row i of W_i(0) is row i of the Metropolis
/// matrix, every other entry and every dual is zero.
std::vector<AgentState> metropolis_row_states(const Graph& g);

/// Agents arriving at step t, with their values and attachment edges
/// (0-based, may reference existing or other arriving agents).
struct LiveEvent {
  int t = 0;
  std::vector<double> values;
  std::vector<Edge> attach_pairs;
};

struct LiveRun {
  std::vector<Vector> x;               // x(0..T); length grows at arrivals
  std::vector<double> error_norm;      // against the current population mean
  std::vector<double> target;          // population mean in force at t
  std::vector<int> population;
  std::vector<Matrix> weights;         // matrix applied at step t (t < T)
  std::vector<double> cf;              // ||weights[t] - J||
  std::vector<double> cf_metropolis;   // Metropolis factor of the graph at t
  Graph final_graph;
};

/// ADMM live: at each step the current estimates give W_bar(t), the values
/// move by x(t+1) = W_bar(t) x(t), then every agent runs one ADMM round.
/// Arrivals regrow the graph and reset all agents' ADMM states to
/// Metropolis rows of the new graph. Disconnecting events are rejected.
LiveRun run_admm_live(const Graph& g0, const Vector& x0, std::span<const LiveEvent> events,
                      const AdmmConfig& cfg, int steps);

/// Same scenario with the Metropolis matrix of the current graph.
LiveRun run_metropolis_live(const Graph& g0, const Vector& x0, std::span<const LiveEvent> events,
                            int steps);

/// cf(W_bar(t)) for every step of an ADMM-live run.
std::vector<double> live_convergence_factor_trace(const LiveRun& run);

}  // namespace fdla
