#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdla/graph.hpp"
#include "fdla/spectral.hpp"
#include "fdla/subproblem.hpp"

namespace fdla {

/// Local variables of one agent: its estimate W_i of the weight matrix and
/// the duals a_i (row sums), b_i (column sums), M_i (neighbour agreement).
struct AgentState {
  Matrix w;
  Vector a;
  Vector b;
  Matrix m;
  bool frozen = false;
  /// Inner splitting state carried between rounds (warm start).
  Matrix warm;
};

struct AdmmConfig {
  double rho = 1.0 / 16.0;
  double epsilon = 1e-3;
  int max_outer = 5000;
  double tol_sub = 1e-8;
  int max_inner = 50'000;
  bool local_freeze = false;

  void validate() const;
};

class SubproblemError : public std::runtime_error {
 public:
  SubproblemError(int agent, int round, double residual);
  int agent() const { return agent_; }
  int round() const { return round_; }

 private:
  int agent_;
  int round_;
};

/// Constraint residuals of one agent.
struct ResidualReport {
  double r1 = 0.0;                          // ||W_i 1 - 1|| / sqrt(n)
  double r2 = 0.0;                          // ||W_i^T 1 - 1|| / sqrt(n)
  std::vector<std::pair<int, double>> r3;   // ||W_i - W_j||_F / n, j proper neighbour
  std::vector<std::pair<int, double>> r4;   // |(W_i)_ij|, j not a neighbour
  double max_residual = 0.0;                // R_i

  double max_r3() const;
};

std::vector<AgentState> zero_states(int n);

/// Instance of agent i's primal update given round-k states.
PrimalInstance parallel_instance(std::span<const AgentState> states, const Graph& g,
                                 double rho, int agent);

ResidualReport residuals(int agent, std::span<const AgentState> states, const Graph& g);

bool stopping_satisfied(std::span<const ResidualReport> reports, double epsilon);

/// Parallel ADMM with per-agent cached subproblem solvers.
class AdmmEngine {
 public:
  AdmmEngine(Graph g, AdmmConfig cfg);
  AdmmEngine(Graph g, AdmmConfig cfg, std::vector<AgentState> initial);

  /// One round: every non-frozen agent solves its primal update from the
  /// round-k exchange, then updates a_i, b_i and M_i with the round-(k+1)
  /// matrices of its neighbours.
  void step();

  int round() const { return round_; }
  const Graph& graph() const { return graph_; }
  const AdmmConfig& config() const { return cfg_; }
  const std::vector<AgentState>& states() const { return states_; }
  std::vector<ResidualReport> residual_reports() const;
  /// Inner iterations spent in the last round, summed over agents.
  long long last_inner_iterations() const { return last_inner_; }

 private:
  Graph graph_;
  AdmmConfig cfg_;
  std::vector<PrimalSolver> solvers_;
  std::vector<AgentState> states_;
  int round_ = 0;
  long long last_inner_ = 0;
};

/// Stateless form of AdmmEngine::step (builds solvers on the fly).
std::vector<AgentState> parallel_round(std::span<const AgentState> states, const Graph& g,
                                       const AdmmConfig& cfg, int k);

/// Edge variables of the serial (non-decoupled) formulation, stored per
/// ordered neighbour pair: x[i][p], c[i][p], d[i][p] belong to
/// (i, neighbors(i)[p]), self pair included.
struct SerialState {
  std::vector<std::vector<Matrix>> x;
  std::vector<std::vector<Matrix>> c;
  std::vector<std::vector<Matrix>> d;
};

SerialState zero_serial(const Graph& g);

/// Agent i's primal update in the serial formulation: anchors X_ij(k) and
/// dual term sum_j C_ij(k).
PrimalInstance serial_instance(std::span<const AgentState> states, const SerialState& serial,
                               const Graph& g, double rho, int agent);

/// One full serial pass: W_i in index order, then X_ij in closed form, then
/// duals a, b, C, D.
std::pair<std::vector<AgentState>, SerialState> serial_round(std::span<const AgentState> states,
                                                             const SerialState& serial,
                                                             const Graph& g,
                                                             const AdmmConfig& cfg, int k);

/// M_i recovered from the serial duals: sum over neighbours of C_ij.
Matrix serial_dual_sum(const SerialState& serial, int agent);

/// L_rho evaluated term by term; edge terms run over ordered neighbour pairs.
double augmented_lagrangian(std::span<const AgentState> states, const SerialState& serial,
                            const Graph& g, double rho);

struct TraceRow {
  int round = 0;
  int agent = 0;
  double objective = 0.0;  // ||W_i - J||
  double max_residual = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double max_r3 = 0.0;
};

struct AdmmRun {
  std::vector<AgentState> states;
  int rounds_used = 0;
  bool stopped = false;  // false: max_outer reached first
  std::vector<TraceRow> trace;
  long long inner_iterations = 0;
};

/// Runs rounds until every R_i <= epsilon or max_outer. Rejects disconnected
/// graphs.
AdmmRun run_until_stop(const Graph& g, const AdmmConfig& cfg);

}  // namespace fdla
