#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdla/admm.hpp"
#include "fdla/consensus.hpp"
#include "fdla/graph.hpp"
#include "json.hpp"

namespace fdla {

enum class ExperimentKind { fixed, live, sweep };

struct SweepGrid {
  std::vector<double> p{0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int repetitions = 10;
  int n = 10;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::fixed;
  Graph graph;
  std::string graph_source;  // free-form description for reports
  AdmmConfig cfg;
  std::optional<Vector> x0;
  std::vector<LiveEvent> events;
  int horizon = 100;
  SweepGrid sweep;
  std::uint64_t seed = 1;
  double crossing_threshold = 0.1;
  double central_tol = 1e-8;
};

/// Six-agent initial values used when no x0 is supplied and n = 6 (mean 33.0260).
Vector six_agent_values();

/// x0 for a run: spec.x0, else six_agent_values() when n = 6, else seeded
/// uniform draws on [0, 100).
Vector initial_values(const ExperimentSpec& spec, int n);

/// Three agents (values 80.0559, 74.5847, 52.1186) joining at t, attached to
/// agents 1, 2, 4 and 6 of a graph with at least six agents (1-based).
LiveEvent three_agent_arrival(int n_existing, int t = 30);

struct FixedReport {
  double cf_central = 0.0;
  double cf_metropolis = 0.0;
  double cf_admm = 0.0;
  int stop_round = 0;
  bool stopped = false;
  Matrix w_star, w_metropolis, w_admm;
  Trajectory central, metropolis, admm;
  int crossing_central = -1, crossing_metropolis = -1, crossing_admm = -1;
  AdmmRun run;
};

/// Central optimum, Metropolis weights and ADMM weights on one graph, each
/// then driven through the protocol from a common x0.
FixedReport run_fixed(const ExperimentSpec& spec);

struct LiveReport {
  LiveRun admm;
  LiveRun metropolis;
  int last_event = 0;               // time of the last arrival (0 if none)
  int crossing_admm = -1;           // first t >= last_event with ||e|| < threshold
  int crossing_metropolis = -1;
  double cf_central_final = 0.0;    // optimum on the final graph
  double cf_metropolis_final = 0.0;
};

LiveReport run_live(const ExperimentSpec& spec);

struct SweepRow {
  double p = 0.0;
  double mean_rounds = 0.0;
  std::vector<int> rounds;
  std::vector<std::uint64_t> seeds;
  int redraws = 0;  // disconnected draws discarded
};

/// For each p: draw ER(n, p) graphs with consecutive seeds, discarding
/// disconnected ones, until `repetitions` connected samples are collected;
/// run ADMM on each and average the stop round.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec);

nlohmann::json spec_json(const ExperimentSpec& spec);
nlohmann::json report_json(const ExperimentSpec& spec, const FixedReport& rep,
                           const std::vector<std::string>& trace_files);
nlohmann::json report_json(const ExperimentSpec& spec, const LiveReport& rep,
                           const std::vector<std::string>& trace_files);
nlohmann::json report_json(const ExperimentSpec& spec, const std::vector<SweepRow>& rows,
                           const std::vector<std::string>& trace_files);

}  // namespace fdla
