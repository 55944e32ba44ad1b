// Command-line front end: weight computation, reference solve and the three
// experiment drivers. Every subcommand prints a short summary and writes its
// artifacts into --out.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fdla/admm.hpp"
#include "fdla/centralized.hpp"
#include "fdla/consensus.hpp"
#include "fdla/graph.hpp"
#include "fdla/harness.hpp"
#include "fdla/io.hpp"
#include "fdla/weights.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fdla;

namespace {

struct CommonOptions {
  std::string graph_path;
  std::string er;
  double rho = 1.0 / 16.0;
  double eps = -1.0;  // < 0: subcommand default
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string format = "json";
  double tol = 1e-8;
  int max_outer = 5000;
  std::string x0_path;
  int steps = 100;
};

// --graph / --er presence is checked when the graph is loaded, so that the
// error names both alternatives.
void add_common(CLI::App* cmd, CommonOptions& o) {
  auto* graph = cmd->add_option("--graph", o.graph_path, "graph file (n, then 1-based edges)");
  auto* er = cmd->add_option("--er", o.er, "Erdos-Renyi graph as n,p,seed");
  graph->excludes(er);
  cmd->add_option("--rho", o.rho, "ADMM penalty parameter")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", o.eps, "stopping tolerance");
  cmd->add_option("--seed", o.seed, "seed for random inputs");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--max-outer", o.max_outer, "ADMM round cap")->check(CLI::PositiveNumber);
}

Graph load_graph(const CommonOptions& o, std::string& source) {
  if (!o.graph_path.empty()) {
    source = o.graph_path;
    return read_graph_file(o.graph_path);
  }
  if (!o.er.empty()) {
    std::string spec = o.er;
    for (char& c : spec)
      if (c == ',') c = ' ';
    std::istringstream ss(spec);
    int n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    if (!(ss >> n >> p >> seed)) throw std::invalid_argument("--er expects n,p,seed");
    source = "er:" + o.er;
    return er_random(n, p, seed);
  }
  throw std::invalid_argument("a graph is required: pass --graph <path> or --er n,p,seed");
}

std::string out_path(const CommonOptions& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

void write_matrix(const CommonOptions& o, const std::string& name, const Matrix& m) {
  std::ofstream f(out_path(o, name));
  if (!f) throw std::runtime_error("cannot write " + name);
  write_matrix_csv(f, m);
}

ExperimentSpec base_spec(const CommonOptions& o, ExperimentKind kind, double default_eps) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.cfg.rho = o.rho;
  spec.cfg.epsilon = o.eps > 0.0 ? o.eps : default_eps;
  spec.cfg.max_outer = o.max_outer;
  spec.seed = o.seed;
  spec.central_tol = o.tol;
  spec.horizon = o.steps;
  if (!o.x0_path.empty()) {
    std::ifstream f(o.x0_path);
    if (!f) throw std::runtime_error("cannot open " + o.x0_path);
    spec.x0 = read_vector(f);
  }
  return spec;
}

// Flat key,value CSV rendering of a JSON report.
void flatten(const nlohmann::json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "." + std::to_string(k), out);
  } else {
    out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

void write_report(const CommonOptions& o, const nlohmann::json& report) {
  if (o.format == "json") {
    write_text_file(out_path(o, "report.json"), report.dump(2) + "\n");
  } else {
    std::ostringstream ss;
    ss << "key,value\n";
    flatten(report, "", ss);
    write_text_file(out_path(o, "report.csv"), ss.str());
  }
}

std::vector<LiveEvent> load_events(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(f);
  std::vector<LiveEvent> events;
  for (const auto& e : j) {
    LiveEvent ev;
    ev.t = e.at("t").get<int>();
    ev.values = e.at("values").get<std::vector<double>>();
    for (const auto& pair : e.at("edges")) {
      auto ij = pair.get<std::vector<int>>();
      if (ij.size() != 2) throw std::runtime_error("events: edges are [i, j] pairs");
      ev.attach_pairs.emplace_back(ij[0] - 1, ij[1] - 1);
    }
    events.push_back(std::move(ev));
  }
  return events;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed fast-consensus weights via ADMM"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* metro = app.add_subcommand("metropolis", "Metropolis weights of a graph");
  add_common(metro, o);

  auto* central = app.add_subcommand("solve-central", "centralised optimum of ||W - J||");
  add_common(central, o);
  central->add_option("--tol", o.tol, "fixed-point tolerance")->check(CLI::PositiveNumber);

  auto* admm = app.add_subcommand("run-admm", "run the distributed ADMM weight computation");
  add_common(admm, o);

  auto* fixed = app.add_subcommand("run-fixed", "compare central, Metropolis and ADMM weights");
  add_common(fixed, o);
  fixed->add_option("--x0", o.x0_path, "initial values file");
  fixed->add_option("--steps", o.steps, "protocol horizon")->check(CLI::NonNegativeNumber);
  fixed->add_option("--tol", o.tol, "central solver tolerance")->check(CLI::PositiveNumber);

  std::string events_path;
  bool default_arrivals = false;
  int arrival_time = 30;
  auto* live = app.add_subcommand("run-live", "ADMM live against Metropolis with arrivals");
  add_common(live, o);
  live->add_option("--x0", o.x0_path, "initial values file");
  live->add_option("--steps", o.steps, "protocol horizon")->check(CLI::NonNegativeNumber);
  live->add_option("--events", events_path, "JSON list of {t, values, edges} (1-based)");
  live->add_flag("--three-arrivals", default_arrivals, "three agents join (needs n >= 6)");
  live->add_option("--arrival-time", arrival_time, "time of --three-arrivals");

  SweepGrid grid;
  auto* sweep = app.add_subcommand("run-sweep", "ADMM stop round over Erdos-Renyi graphs");
  add_common(sweep, o);
  sweep->add_option("--n", grid.n, "agents per graph")->check(CLI::PositiveNumber);
  sweep->add_option("--p", grid.p, "edge probabilities")->delimiter(',');
  sweep->add_option("--reps", grid.repetitions, "connected samples per p")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    std::cout << std::setprecision(10);
    std::string source;
    if (metro->parsed()) {
      Graph g = load_graph(o, source);
      WeightMatrix wm = metropolis(g);
      write_matrix(o, "w_metropolis.csv", wm.values());
      std::cout << "metropolis factor " << convergence_factor(wm.values()) << '\n';
    } else if (central->parsed()) {
      Graph g = load_graph(o, source);
      CentralSolution sol = solve_p2(g, o.tol);
      write_matrix(o, "w_star.csv", sol.w_star.values());
      std::cout << "factor " << sol.factor << '\n'
                << "iterations " << sol.iterations << '\n'
                << "lemma1 " << (verify_lemma1(sol) ? "ok" : "FAILED") << '\n';
    } else if (admm->parsed()) {
      Graph g = load_graph(o, source);
      AdmmConfig cfg;
      cfg.rho = o.rho;
      cfg.epsilon = o.eps > 0.0 ? o.eps : 1e-3;
      cfg.max_outer = o.max_outer;
      AdmmRun run = run_until_stop(g, cfg);
      std::vector<Vector> rows;
      for (int i = 0; i < g.size(); ++i) rows.push_back(run.states[i].w.row(i).transpose());
      Matrix w = assemble_from_rows(rows, g).values();
      write_matrix(o, "w_admm.csv", w);
      std::ofstream trace(out_path(o, "admm_trace.csv"));
      write_trace_csv(trace, run.trace);
      std::cout << "stop_round " << run.rounds_used << (run.stopped ? "" : " (cap reached)") << '\n'
                << "admm factor " << convergence_factor(w) << '\n';
    } else if (fixed->parsed()) {
      ExperimentSpec spec = base_spec(o, ExperimentKind::fixed, 1e-3);
      spec.graph = load_graph(o, source);
      spec.graph_source = source;
      FixedReport rep = run_fixed(spec);
      write_matrix(o, "w_star.csv", rep.w_star);
      write_matrix(o, "w_metropolis.csv", rep.w_metropolis);
      write_matrix(o, "w_admm.csv", rep.w_admm);
      {
        std::ofstream f(out_path(o, "admm_trace.csv"));
        write_trace_csv(f, rep.run.trace);
      }
      std::vector<std::pair<std::string, const Trajectory*>> trajs{
          {"trajectory_central.csv", &rep.central},
          {"trajectory_metropolis.csv", &rep.metropolis},
          {"trajectory_admm.csv", &rep.admm}};
      std::vector<std::string> files{"admm_trace.csv"};
      for (auto& [name, tr] : trajs) {
        std::ofstream f(out_path(o, name));
        write_trajectory_csv(f, *tr);
        files.push_back(name);
      }
      write_report(o, report_json(spec, rep, files));
      std::cout << "factors central " << rep.cf_central << " metropolis " << rep.cf_metropolis
                << " admm " << rep.cf_admm << '\n'
                << "stop_round " << rep.stop_round << '\n';
    } else if (live->parsed()) {
      ExperimentSpec spec = base_spec(o, ExperimentKind::live, 1e-3);
      spec.graph = load_graph(o, source);
      spec.graph_source = source;
      if (!events_path.empty()) spec.events = load_events(events_path);
      if (default_arrivals) spec.events.push_back(three_agent_arrival(spec.graph.size(), arrival_time));
      LiveReport rep = run_live(spec);
      {
        std::ofstream f(out_path(o, "live_admm.csv"));
        write_live_csv(f, rep.admm);
      }
      {
        std::ofstream f(out_path(o, "live_metropolis.csv"));
        write_live_csv(f, rep.metropolis);
      }
      write_report(o, report_json(spec, rep, {"live_admm.csv", "live_metropolis.csv"}));
      auto show = [](int t) { return t < 0 ? std::string("never") : std::to_string(t); };
      std::cout << "error < " << spec.crossing_threshold << " after t = " << rep.last_event
                << ": admm live " << show(rep.crossing_admm) << ", metropolis "
                << show(rep.crossing_metropolis) << '\n';
    } else if (sweep->parsed()) {
      ExperimentSpec spec = base_spec(o, ExperimentKind::sweep, 1e-2);
      spec.sweep = grid;
      spec.graph_source = "er sweep";
      spec.graph = Graph::complete(1);
      auto rows = run_sweep(spec);
      {
        std::ofstream f(out_path(o, "sweep.csv"));
        f << "p,mean_rounds,samples,redraws\n" << std::setprecision(17);
        for (const auto& r : rows)
          f << r.p << ',' << r.mean_rounds << ',' << r.rounds.size() << ',' << r.redraws << '\n';
      }
      write_report(o, report_json(spec, rows, {"sweep.csv"}));
      for (const auto& r : rows)
        std::cout << "p " << r.p << " mean_rounds " << r.mean_rounds << " redraws " << r.redraws
                  << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
