#include "fdla/harness.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "fdla/centralized.hpp"
#include "fdla/weights.hpp"

namespace fdla {

Vector six_agent_values() {
  Vector x(6);
  x << 70.6046, 3.1833, 27.6923, 4.6171, 9.7132, 82.3458;
  return x;
}

Vector initial_values(const ExperimentSpec& spec, int n) {
  if (spec.x0) {
    if (spec.x0->size() != n) throw std::invalid_argument("x0 length does not match graph");
    return *spec.x0;
  }
  if (n == 6) return six_agent_values();
  std::mt19937_64 gen(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = 100.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return x;
}

LiveEvent three_agent_arrival(int n_existing, int t) {
  if (n_existing < 6) throw std::invalid_argument("three_agent_arrival: need at least 6 agents");
  const int a = n_existing, b = n_existing + 1, c = n_existing + 2;
  return {t, {80.0559, 74.5847, 52.1186}, {{a, 0}, {a, 1}, {b, a}, {b, 3}, {c, b}, {c, 5}}};
}

FixedReport run_fixed(const ExperimentSpec& spec) {
  const Graph& g = spec.graph;
  if (!g.is_connected()) throw std::invalid_argument("run_fixed: graph not connected");
  const int n = g.size();
  FixedReport rep;

  CentralSolution central = solve_p2(g, spec.central_tol);
  rep.w_star = central.w_star.values();
  rep.cf_central = central.factor;
  rep.w_metropolis = metropolis(g).values();
  rep.cf_metropolis = convergence_factor(rep.w_metropolis);

  rep.run = run_until_stop(g, spec.cfg);
  rep.stop_round = rep.run.rounds_used;
  rep.stopped = rep.run.stopped;
  std::vector<Vector> rows;
  for (int i = 0; i < n; ++i) rows.push_back(rep.run.states[i].w.row(i).transpose());
  rep.w_admm = assemble_from_rows(rows, g).values();
  rep.cf_admm = convergence_factor(rep.w_admm);

  const Vector x0 = initial_values(spec, n);
  rep.central = run_protocol(rep.w_star, x0, spec.horizon);
  rep.metropolis = run_protocol(rep.w_metropolis, x0, spec.horizon);
  rep.admm = run_protocol(rep.w_admm, x0, spec.horizon);
  rep.crossing_central = first_crossing(rep.central.error_norm, spec.crossing_threshold);
  rep.crossing_metropolis = first_crossing(rep.metropolis.error_norm, spec.crossing_threshold);
  rep.crossing_admm = first_crossing(rep.admm.error_norm, spec.crossing_threshold);
  return rep;
}

LiveReport run_live(const ExperimentSpec& spec) {
  const Graph& g = spec.graph;
  const Vector x0 = initial_values(spec, g.size());
  LiveReport rep;
  rep.admm = run_admm_live(g, x0, spec.events, spec.cfg, spec.horizon);
  rep.metropolis = run_metropolis_live(g, x0, spec.events, spec.horizon);
  for (const auto& ev : spec.events)
    if (ev.t <= spec.horizon) rep.last_event = std::max(rep.last_event, ev.t);
  rep.crossing_admm = first_crossing(rep.admm.error_norm, spec.crossing_threshold, rep.last_event);
  rep.crossing_metropolis =
      first_crossing(rep.metropolis.error_norm, spec.crossing_threshold, rep.last_event);
  if (spec.horizon > 0 || !spec.events.empty()) {
    rep.cf_central_final = solve_p2(rep.admm.final_graph, spec.central_tol).factor;
    rep.cf_metropolis_final = convergence_factor(metropolis(rep.admm.final_graph).values());
  }
  return rep;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
  const SweepGrid& grid = spec.sweep;
  if (grid.repetitions <= 0 || grid.n <= 0) throw std::invalid_argument("run_sweep: empty grid");
  std::vector<SweepRow> rows;
  for (std::size_t q = 0; q < grid.p.size(); ++q) {
    SweepRow row;
    row.p = grid.p[q];
    std::uint64_t seed = spec.seed * 1'000'003ULL + q * 100'000ULL;
    while (static_cast<int>(row.rounds.size()) < grid.repetitions) {
      Graph g = er_random(grid.n, row.p, seed);
      if (!g.is_connected()) {
        ++row.redraws;
        ++seed;
        if (row.redraws > 10'000) throw std::runtime_error("run_sweep: p too small to connect");
        continue;
      }
      AdmmRun run = run_until_stop(g, spec.cfg);
      row.rounds.push_back(run.rounds_used);
      row.seeds.push_back(seed);
      ++seed;
    }
    double total = 0.0;
    for (int r : row.rounds) total += r;
    row.mean_rounds = total / static_cast<double>(row.rounds.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fixed: return "fixed";
    case ExperimentKind::live: return "live";
    case ExperimentKind::sweep: return "sweep";
  }
  return "unknown";
}

nlohmann::json crossing(int t) { return t < 0 ? nlohmann::json(nullptr) : nlohmann::json(t); }

}  // namespace

nlohmann::json spec_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  j["graph"] = spec.graph_source;
  j["n"] = spec.graph.size();
  j["edges"] = spec.graph.num_edges();
  j["rho"] = spec.cfg.rho;
  j["epsilon"] = spec.cfg.epsilon;
  j["max_outer"] = spec.cfg.max_outer;
  j["tol_sub"] = spec.cfg.tol_sub;
  j["seed"] = spec.seed;
  j["horizon"] = spec.horizon;
  if (spec.kind == ExperimentKind::sweep) {
    j["sweep"] = {{"n", spec.sweep.n}, {"p", spec.sweep.p}, {"repetitions", spec.sweep.repetitions}};
  }
  if (!spec.events.empty()) {
    auto evs = nlohmann::json::array();
    for (const auto& ev : spec.events) {
      auto edges = nlohmann::json::array();
      for (auto [a, b] : ev.attach_pairs) edges.push_back({a + 1, b + 1});
      evs.push_back({{"t", ev.t}, {"values", ev.values}, {"edges", edges}});
    }
    j["events"] = evs;
  }
  return j;
}

nlohmann::json report_json(const ExperimentSpec& spec, const FixedReport& rep,
                           const std::vector<std::string>& trace_files) {
  nlohmann::json j;
  j["spec"] = spec_json(spec);
  j["factors"] = {{"central", rep.cf_central}, {"metropolis", rep.cf_metropolis}, {"admm", rep.cf_admm}};
  j["stop_round"] = rep.stop_round;
  j["stopped"] = rep.stopped;
  j["crossings"] = {{"threshold", spec.crossing_threshold},
                    {"central", crossing(rep.crossing_central)},
                    {"metropolis", crossing(rep.crossing_metropolis)},
                    {"admm", crossing(rep.crossing_admm)}};
  j["reference_six_agent_network"] = {{"central", 0.4492}, {"metropolis", 0.6724}, {"admm", 0.4519}};
  j["trace_files"] = trace_files;
  return j;
}

nlohmann::json report_json(const ExperimentSpec& spec, const LiveReport& rep,
                           const std::vector<std::string>& trace_files) {
  nlohmann::json j;
  j["spec"] = spec_json(spec);
  j["factors"] = {{"central", rep.cf_central_final},
                  {"metropolis", rep.cf_metropolis_final},
                  {"admm", rep.admm.cf.empty() ? nlohmann::json(nullptr) : nlohmann::json(rep.admm.cf.back())}};
  j["stop_round"] = nullptr;
  j["crossings"] = {{"threshold", spec.crossing_threshold},
                    {"after", rep.last_event},
                    {"admm_live", crossing(rep.crossing_admm)},
                    {"metropolis", crossing(rep.crossing_metropolis)}};
  j["trace_files"] = trace_files;
  return j;
}

nlohmann::json report_json(const ExperimentSpec& spec, const std::vector<SweepRow>& rows,
                           const std::vector<std::string>& trace_files) {
  nlohmann::json j;
  j["spec"] = spec_json(spec);
  auto table = nlohmann::json::array();
  for (const auto& r : rows)
    table.push_back({{"p", r.p}, {"mean_rounds", r.mean_rounds}, {"rounds", r.rounds},
                     {"seeds", r.seeds}, {"redraws", r.redraws}});
  j["sweep"] = table;
  j["trace_files"] = trace_files;
  return j;
}

}  // namespace fdla
