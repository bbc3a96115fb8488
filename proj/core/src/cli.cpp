#include "dssnal/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "dssnal/io.hpp"
#include "dssnal/solver.hpp"
#include "dssnal/subproblem.hpp"

namespace dssnal {

namespace {

int log_level() {
  const char* env = std::getenv("DSSNAL_LOG");
  if (!env || !*env) return 0;
  return std::atoi(env);
}

struct SolveSpec {
  std::string name = "run";
  std::string family = "huber";
  std::string data_path;
  std::string format = "svmlight";
  int gen_n = 0;
  int gen_S = 0;
  int zscore_mode = -1;  // -1 auto: on for files, off for generated data
  double gamma = 0.1;
  double rho = 1.0;
  double nu = 1.0;
  double C = 1.0;
  int m = 0;
  std::string partition = "contiguous";
  std::string topology = "complete";
  std::string gossip_kind = "auto";
  std::string solver = "dssnal";
  double sigma0 = 1.0;
  double sigma_growth = 1.5;
  double sigma_max = 1e6;
  std::string criterion = "A";
  std::string dual_update_mode = "algorithm3";
  std::string sigma_index = "next";
  std::string eta_schedule = "geometric";
  double warm_tol = 0.5;
  int warm_cap = 5000;
  int newton_cap = 50;
  int apg_cap = 100000;
  double tol = 1e-6;
  int max_outer = 100;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool parallel = false;
  bool write_outputs = true;
};

Family parse_family(const std::string& name) {
  if (name == "huber") return Family::huber;
  if (name == "svc") return Family::svc;
  throw ParameterError("unknown family '" + name + "'");
}

Criterion parse_criterion(const std::string& name) {
  if (name == "A") return Criterion::A;
  if (name == "B") return Criterion::B;
  if (name == "C") return Criterion::C;
  if (name == "combined") return Criterion::combined;
  throw ParameterError("unknown criterion '" + name + "'");
}

SolverConfig solver_config_of(const SolveSpec& spec) {
  SolverConfig cfg;
  cfg.sigma0 = spec.sigma0;
  cfg.sigma_growth = spec.sigma_growth;
  cfg.sigma_max = spec.sigma_max;
  cfg.criterion = parse_criterion(spec.criterion);
  cfg.warm_start_tol = spec.warm_tol;
  cfg.warm_start_cap = spec.warm_cap;
  cfg.newton_cap = spec.newton_cap;
  cfg.apg_cap = spec.apg_cap;
  cfg.max_outer = spec.max_outer;
  cfg.kkt_target = spec.tol;
  cfg.dual_mode = spec.dual_update_mode == "plain" ? DualUpdateMode::plain : DualUpdateMode::algorithm3;
  cfg.sigma_index = spec.sigma_index == "current" ? SigmaIndexMode::current : SigmaIndexMode::next;
  cfg.eta.kind = spec.eta_schedule == "gradient" ? EtaSchedule::Kind::gradient : EtaSchedule::Kind::geometric;
  cfg.inner = spec.solver == "dapg" ? InnerSolver::first_order : InnerSolver::newton;
  return cfg;
}

Dataset load_spec_dataset(const SolveSpec& spec) {
  if (!spec.data_path.empty()) {
    Dataset data = spec.format == "csv" ? load_csv(spec.data_path) : load_svmlight(spec.data_path);
    if (spec.zscore_mode != 0) data = zscore(std::move(data));  // default on for files
    return data;
  }
  if (spec.gen_n < 1 || spec.gen_S < 1)
    throw ParameterError("provide --data or --gen with n and S");
  Dataset data = parse_family(spec.family) == Family::huber
                     ? gen_random_regression(spec.gen_n, spec.gen_S, spec.seed)
                     : gen_random_classification(spec.gen_n, spec.gen_S, spec.seed);
  if (spec.zscore_mode == 1) data = zscore(std::move(data));
  return data;
}

GossipMatrix gossip_of(const SolveSpec& spec, const Graph& graph) {
  std::string kind = spec.gossip_kind;
  if (kind == "auto") kind = spec.topology == "complete" ? "projection" : "laplacian";
  if (kind == "projection") {
    if (spec.topology != "complete")
      throw ParameterError("projection gossip is dense; it only matches the complete topology");
    return projection_gossip(graph.m);
  }
  if (kind == "laplacian") return laplacian_gossip(graph);
  throw ParameterError("unknown gossip kind '" + kind + "'");
}

struct RunOutcome {
  SolveResult result;
  RunSummary summary;
  double seconds = 0.0;
};

RunOutcome execute_solve(const SolveSpec& spec) {
  if (spec.m < 2) throw ParameterError("need at least 2 agents");
  const Family family = parse_family(spec.family);

  Dataset data = load_spec_dataset(spec);
  const int samples = data.S;

  ProblemInstance instance;
  instance.family = family;
  instance.n = data.n;
  instance.agents = spec.m;
  instance.samples = samples;
  instance.features = std::move(data.features);
  instance.labels = std::move(data.labels);
  instance.partition = spec.partition == "random" ? random_partition(samples, spec.m, spec.seed)
                                                  : contiguous_partition(samples, spec.m);
  instance.params.rho = spec.rho;
  instance.params.gamma = spec.gamma;
  instance.params.nu = spec.nu;
  instance.params.C = spec.C;

  const Graph graph = make_topology(spec.topology, spec.m, spec.seed);
  const GossipMatrix gossip = gossip_of(spec, graph);
  auto objective = make_objective(std::move(instance));
  SyncNetwork net(graph, spec.parallel ? ExecMode::parallel : ExecMode::sequential);

  ProgressObserver progress;
  if (log_level() >= 1) {
    progress = [](const OuterRecord& r) {
      std::fprintf(stderr, "outer %d: r_kkt=%.3e grad=%.3e sigma=%.3g newton=%d apg=%ld rounds=%ld\n",
                   r.iteration, r.r_kkt, r.grad_phi_norm, r.sigma, r.inner_newton_iters, r.apg_iters,
                   r.rounds);
    };
  }

  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.result = solve(*objective, gossip, net, solver_config_of(spec), progress);
  outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  RunSummary& s = outcome.summary;
  s.family = spec.family;
  s.solver = spec.solver;
  s.topology = spec.topology;
  s.m = spec.m;
  s.n = objective->dim();
  s.S = objective->instance().samples;
  s.seed = spec.seed;
  s.converged = outcome.result.converged;
  s.inner_flagged = outcome.result.inner_flagged;
  s.outer_iterations = outcome.result.outer_iterations;
  s.r_kkt = outcome.result.final_r_kkt;
  s.objective = outcome.result.objective;
  s.rounds = outcome.result.ledger.rounds;
  s.vectors_sent = outcome.result.ledger.vectors_sent;
  s.reduce_ops = outcome.result.ledger.reduce_ops;
  for (const OuterRecord& r : outcome.result.trace)
    s.first_order_iterations += r.apg_iters + r.warmstart_grad_evals;

  if (spec.write_outputs) {
    std::filesystem::create_directories(spec.out_dir);
    const std::filesystem::path dir(spec.out_dir);
    write_trace_jsonl((dir / "trace.jsonl").string(), outcome.result.trace);
    write_solution_vector((dir / "solution.txt").string(), outcome.result.average);
    write_summary_json((dir / "summary.json").string(), outcome.summary);
  }
  return outcome;
}

std::string iteration_cell(const RunOutcome& outcome) {
  std::ostringstream os;
  os << outcome.summary.outer_iterations << "(" << outcome.summary.first_order_iterations << ")";
  return os.str();
}

void add_solve_options(CLI::App* cmd, SolveSpec& spec) {
  cmd->set_config("--config");
  cmd->add_option("--family", spec.family, "Problem family")->check(CLI::IsMember({"huber", "svc"}));
  cmd->add_option("--data", spec.data_path, "Dataset file");
  cmd->add_option("--format", spec.format, "Dataset format")->check(CLI::IsMember({"svmlight", "csv"}));
  auto* gen = cmd->add_option("--gen", "Generate data: n=<dim> S=<samples>")->expected(-1);
  gen->each([&spec](const std::string& tok) {
    std::istringstream ss(tok);
    std::string part;
    while (std::getline(ss, part, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--gen expects k=v tokens");
      const std::string key = part.substr(0, eq);
      const int value = std::stoi(part.substr(eq + 1));
      if (key == "n")
        spec.gen_n = value;
      else if (key == "S")
        spec.gen_S = value;
      else
        throw CLI::ValidationError("--gen keys are n and S");
    }
  });
  cmd->add_flag("--zscore,!--no-zscore",
                [&spec](std::int64_t count) { spec.zscore_mode = count > 0 ? 1 : 0; },
                "Standardize features (default: on for files, off for generated data)");
  cmd->add_option("--gamma", spec.gamma, "l1 weight");
  cmd->add_option("--rho", spec.rho, "ridge weight");
  cmd->add_option("--nu", spec.nu, "huber transition width");
  cmd->add_option("--C", spec.C, "squared-hinge weight");
  cmd->add_option("--m", spec.m, "Agent count")->required();
  cmd->add_option("--partition", spec.partition, "Sample assignment")
      ->check(CLI::IsMember({"contiguous", "random"}));
  cmd->add_option("--topology", spec.topology, "complete|ring|path|grid|er:<p>|file:<path>");
  cmd->add_option("--gossip", spec.gossip_kind, "Mixing matrix kind")
      ->check(CLI::IsMember({"auto", "projection", "laplacian"}));
  cmd->add_option("--solver", spec.solver, "Inner solver")->check(CLI::IsMember({"dssnal", "dapg"}));
  cmd->add_option("--sigma0", spec.sigma0, "Initial penalty");
  cmd->add_option("--sigma-growth", spec.sigma_growth, "Penalty growth factor");
  cmd->add_option("--sigma-max", spec.sigma_max, "Penalty cap");
  cmd->add_option("--criterion", spec.criterion, "Inner stopping criterion")
      ->check(CLI::IsMember({"A", "B", "C", "combined"}));
  cmd->add_option("--dual-update", spec.dual_update_mode, "Lower multiplier rule")
      ->check(CLI::IsMember({"algorithm3", "plain"}));
  cmd->add_option("--sigma-index", spec.sigma_index, "Penalty used by the dual update")
      ->check(CLI::IsMember({"next", "current"}));
  cmd->add_option("--eta-schedule", spec.eta_schedule, "Forcing-term schedule")
      ->check(CLI::IsMember({"geometric", "gradient"}));
  cmd->add_option("--warm-tol", spec.warm_tol, "Warm-start tolerance");
  cmd->add_option("--warm-cap", spec.warm_cap, "Warm-start iteration cap");
  cmd->add_option("--newton-cap", spec.newton_cap, "Newton steps per outer iteration");
  cmd->add_option("--apg-cap", spec.apg_cap, "Momentum iterations per direction solve");
  cmd->add_option("--tol", spec.tol, "KKT residual target");
  cmd->add_option("--max-outer", spec.max_outer, "Outer iteration cap");
  cmd->add_option("--seed", spec.seed, "Seed for every random choice");
  cmd->add_option("--out", spec.out_dir, "Output directory");
  cmd->add_flag("--parallel-agents", spec.parallel, "Run agents on threads within each round");
}

int cmd_solve(const SolveSpec& spec) {
  const RunOutcome outcome = execute_solve(spec);
  std::printf("%s family=%s m=%d n=%d S=%d r_kkt=%.6e iter=%s obj=%.10g rounds=%ld time=%.3fs\n",
              outcome.summary.converged ? "converged" : "capped", outcome.summary.family.c_str(),
              outcome.summary.m, outcome.summary.n, outcome.summary.S, outcome.summary.r_kkt,
              iteration_cell(outcome).c_str(), outcome.summary.objective, outcome.summary.rounds,
              outcome.seconds);
  return 0;
}

int cmd_gen_data(const std::string& family, int n, int S, std::uint64_t seed, const std::string& out) {
  const Dataset data = parse_family(family) == Family::huber ? gen_random_regression(n, S, seed)
                                                             : gen_random_classification(n, S, seed);
  save_svmlight(data, out);
  std::printf("wrote %s: n=%d S=%d family=%s seed=%llu\n", out.c_str(), data.n, data.S, family.c_str(),
              static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_validate_gossip(const std::string& topology, int m, std::uint64_t seed,
                        const std::string& kind) {
  const Graph graph = make_topology(topology, m, seed);
  std::string resolved = kind;
  if (resolved == "auto") resolved = topology == "complete" ? "projection" : "laplacian";
  const GossipMatrix gossip =
      resolved == "projection" ? projection_gossip(m) : laplacian_gossip(graph);
  const GossipValidation report = validate_gossip(gossip, graph);
  std::printf("topology=%s m=%d gossip=%s\n%s", topology.c_str(), m, resolved.c_str(),
              report.report().c_str());
  return report.all_pass() ? 0 : 1;
}

SolveSpec spec_from_bench_line(const std::string& line, long lineno) {
  SolveSpec spec;
  spec.write_outputs = false;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("bench entries are key=value tokens", lineno);
    const std::string key = tok.substr(0, eq);
    const std::string value = tok.substr(eq + 1);
    if (key == "name") spec.name = value;
    else if (key == "family") spec.family = value;
    else if (key == "data") spec.data_path = value;
    else if (key == "format") spec.format = value;
    else if (key == "gen_n") spec.gen_n = std::stoi(value);
    else if (key == "gen_S") spec.gen_S = std::stoi(value);
    else if (key == "zscore") spec.zscore_mode = std::stoi(value);
    else if (key == "gamma") spec.gamma = std::stod(value);
    else if (key == "rho") spec.rho = std::stod(value);
    else if (key == "nu") spec.nu = std::stod(value);
    else if (key == "C") spec.C = std::stod(value);
    else if (key == "m") spec.m = std::stoi(value);
    else if (key == "partition") spec.partition = value;
    else if (key == "topology") spec.topology = value;
    else if (key == "gossip") spec.gossip_kind = value;
    else if (key == "solver") spec.solver = value;
    else if (key == "sigma0") spec.sigma0 = std::stod(value);
    else if (key == "sigma_growth") spec.sigma_growth = std::stod(value);
    else if (key == "sigma_max") spec.sigma_max = std::stod(value);
    else if (key == "criterion") spec.criterion = value;
    else if (key == "dual_update") spec.dual_update_mode = value;
    else if (key == "sigma_index") spec.sigma_index = value;
    else if (key == "eta_schedule") spec.eta_schedule = value;
    else if (key == "tol") spec.tol = std::stod(value);
    else if (key == "max_outer") spec.max_outer = std::stoi(value);
    else if (key == "newton_cap") spec.newton_cap = std::stoi(value);
    else if (key == "seed") spec.seed = std::stoull(value);
    else throw ParseError("unknown bench key '" + key + "'", lineno);
  }
  if (spec.name == "run") spec.name = "line" + std::to_string(lineno);
  return spec;
}

int cmd_bench(const std::string& specs_path, const std::string& out_csv) {
  std::ifstream in(specs_path);
  if (!in) throw ParseError("cannot open bench specs " + specs_path);
  std::ofstream out(out_csv);
  if (!out) throw ParseError("cannot write bench csv " + out_csv);
  out << "name,r_kkt,time,iter,obj,m,n,S\n";
  std::string line;
  long lineno = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const SolveSpec spec = spec_from_bench_line(line, lineno);
    const RunOutcome outcome = execute_solve(spec);
    char row[512];
    std::snprintf(row, sizeof(row), "%s,%.6e,%.3f,%s,%.10g,%d,%d,%d\n", spec.name.c_str(),
                  outcome.summary.r_kkt, outcome.seconds, iteration_cell(outcome).c_str(),
                  outcome.summary.objective, outcome.summary.m, outcome.summary.n, outcome.summary.S);
    out << row;
    ++rows;
    if (log_level() >= 1) std::fprintf(stderr, "bench %s done (r_kkt=%.2e)\n", spec.name.c_str(), outcome.summary.r_kkt);
  }
  std::printf("bench complete: %d rows -> %s\n", rows, out_csv.c_str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Distributed consensus optimization: augmented-Lagrangian outer loop with "
               "semismooth-Newton inner solves over a simulated synchronous agent network"};
  app.require_subcommand(1);

  SolveSpec spec;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run the solver and write trace/solution/summary");
  add_solve_options(solve_cmd, spec);

  std::string gd_family = "huber";
  int gd_n = 0, gd_S = 0;
  std::uint64_t gd_seed = 0;
  std::string gd_out = "dataset.svm";
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Write a generated dataset");
  gen_cmd->add_option("--family", gd_family)->check(CLI::IsMember({"huber", "svc"}));
  gen_cmd->add_option("--n", gd_n, "Feature dimension")->required();
  gen_cmd->add_option("--S", gd_S, "Sample count")->required();
  gen_cmd->add_option("--seed", gd_seed);
  gen_cmd->add_option("--out", gd_out, "Output file");

  std::string vg_topology = "complete";
  int vg_m = 0;
  std::uint64_t vg_seed = 0;
  std::string vg_kind = "auto";
  CLI::App* vg_cmd = app.add_subcommand("validate-gossip", "Check the mixing-matrix properties");
  vg_cmd->add_option("--topology", vg_topology);
  vg_cmd->add_option("--m", vg_m, "Agent count")->required();
  vg_cmd->add_option("--seed", vg_seed);
  vg_cmd->add_option("--gossip", vg_kind)->check(CLI::IsMember({"auto", "projection", "laplacian"}));

  std::string bench_specs, bench_out = "bench.csv";
  CLI::App* bench_cmd = app.add_subcommand("bench", "Sweep run specs, one CSV row each");
  bench_cmd->add_option("--specs", bench_specs, "Spec file, one key=value run per line")->required();
  bench_cmd->add_option("--out", bench_out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(spec);
    if (gen_cmd->parsed()) return cmd_gen_data(gd_family, gd_n, gd_S, gd_seed, gd_out);
    if (vg_cmd->parsed()) return cmd_validate_gossip(vg_topology, vg_m, vg_seed, vg_kind);
    if (bench_cmd->parsed()) return cmd_bench(bench_specs, bench_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> owned;
  owned.reserve(args.size() + 1);
  owned.push_back("dssnal");
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(owned.size());
  for (const auto& a : owned) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dssnal
