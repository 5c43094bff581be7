// binseq: command-line front end for the sequence design library.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "binseq/baselines.hpp"
#include "binseq/errors.hpp"
#include "binseq/experiments.hpp"
#include "binseq/io.hpp"
#include "binseq/oracle.hpp"
#include "binseq/rounding.hpp"
#include "binseq/sdp.hpp"

namespace {

using namespace binseq;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoFeasible = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<double> alpha;
  std::string score = "power";
  std::string output;
  int jobs = 0;
  std::string variant = "binary";
  int n_limit = kOracleLimit;
  int shape_max_iters = ShapeOptions{}.max_iters;
  double lpnn_step = LpnnOptions{}.step;
  double lpnn_c0 = LpnnOptions{}.c0;
  int lpnn_max_iters = LpnnOptions{}.max_iters;
  std::string kind;
  bool paper_scale = false;
  bool timing = false;
  std::optional<int> repetitions;
};

DesignProblem load_problem(const Options& o) {
  DesignProblem p = problem_from_json(read_json_file(o.config));
  if (o.seed) p.seed = *o.seed;
  if (o.trials) p.trials = *o.trials;
  if (o.alpha) p.alpha = *o.alpha;
  validate_problem(p);
  return p;
}

void emit(const Options& o, const std::string& text) {
  std::cout << text;
  std::cout.flush();
  if (!o.output.empty()) {
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + o.output + " for writing");
    out << text;
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_design(const Options& o) {
  const DesignProblem p = load_problem(o);
  const ScoreKind score = parse_score_kind(o.score);
  Json out;
  int code = kExitOk;
  try {
    const SdpSolution sol = solve_relaxation(p);
    const DesignResult r = run_design(p, sol, score);
    out = design_result_to_json(r);
    out["relaxation"] = relaxation_summary_to_json(sol);
    if (!r.best) code = kExitNoFeasible;
  } catch (const InfeasibleRelaxationError& e) {
    DesignResult r;
    r.n_trials = p.trials;
    r.score_kind = score;
    out = design_result_to_json(r);
    out["relaxation"] = nullptr;
    std::cerr << "binseq: " << e.what() << "\n";
    code = kExitNoFeasible;
  }
  out["problem"] = problem_to_json(p);
  emit(o, dump(out));
  return code;
}

int cmd_oracle(const Options& o) {
  const DesignProblem p = load_problem(o);
  try {
    Json out = oracle_result_to_json(exhaustive_search(p, o.n_limit));
    out["problem"] = problem_to_json(p);
    emit(o, dump(out));
    return kExitOk;
  } catch (const NoFeasibleError& e) {
    std::cerr << "binseq: " << e.what() << "\n";
    return kExitNoFeasible;
  }
}

int cmd_shape(const Options& o) {
  const DesignProblem p = load_problem(o);
  const Variant v = parse_variant(o.variant);
  ShapeOptions opts;
  opts.max_iters = o.shape_max_iters;
  opts.seed = p.seed;
  Json out = baseline_result_to_json(run_shape(p, v, opts), v);
  out["method"] = "shape";
  out["problem"] = problem_to_json(p);
  emit(o, dump(out));
  return kExitOk;
}

int cmd_lpnn(const Options& o) {
  const DesignProblem p = load_problem(o);
  const Variant v = parse_variant(o.variant);
  LpnnOptions opts;
  opts.max_iters = o.lpnn_max_iters;
  opts.step = o.lpnn_step;
  opts.c0 = o.lpnn_c0;
  opts.seed = p.seed;
  Json out = baseline_result_to_json(run_lpnn(p, v, opts), v);
  out["method"] = "lpnn";
  out["problem"] = problem_to_json(p);
  emit(o, dump(out));
  return kExitOk;
}

int cmd_experiment(const Options& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    Json j = read_json_file(o.config);
    if (o.paper_scale) j["paper_scale"] = true;
    if (!o.kind.empty()) j["kind"] = o.kind;
    cfg = experiment_from_json(j);
  } else if (!o.kind.empty()) {
    cfg = default_experiment_config(parse_experiment_kind(o.kind), o.paper_scale);
  } else {
    throw ConfigError("experiment needs --config or --kind");
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.problem.trials = *o.trials;
  if (o.alpha) cfg.problem.alpha = *o.alpha;
  if (o.repetitions) cfg.repetitions = *o.repetitions;
  cfg.problem.seed = cfg.seed;
  cfg.timing = o.timing;
  cfg.shape.max_iters = o.shape_max_iters;
  cfg.lpnn.step = o.lpnn_step;
  cfg.lpnn.c0 = o.lpnn_c0;
  cfg.lpnn.max_iters = o.lpnn_max_iters;
  validate_experiment(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport report = run_experiment(cfg);
  const auto path = write_csv_file(report, cfg, o.output.empty() ? "." : o.output);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", seconds);
  std::cout << "wrote " << report.rows.size() << " rows to " << path.string() << " in " << buf
            << " s";
  if (report.failures > 0) std::cout << " (" << report.failures << " failed jobs)";
  std::cout << "\n";
  return kExitOk;
}

int cmd_dump_sdp(const Options& o) {
  const DesignProblem p = load_problem(o);
  const SdpSolution sol = solve_relaxation(p);
  std::ostringstream csv;
  write_matrix_csv(sol.matrix, csv);
  if (o.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + o.output + " for writing");
    out << csv.str();
  }
  return kExitOk;
}

void add_problem_flags(CLI::App* sub, Options& o, bool config_required = true) {
  auto* c = sub->add_option("--config", o.config, "JSON problem file");
  if (config_required) c->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "PRNG seed (default: config value, else 0)");
  sub->add_option("--trials", o.trials, "rounding trial count L");
  sub->add_option("--alpha", o.alpha, "interferer tolerance");
  sub->add_option("--output", o.output, "also write the result to this path");
  sub->add_option("--jobs", o.jobs, "worker threads (default: all cores)");
}

void add_baseline_flags(CLI::App* sub, Options& o) {
  sub->add_option("--shape-max-iters", o.shape_max_iters, "SHAPE iteration cap");
  sub->add_option("--lpnn-step", o.lpnn_step, "LPNN Euler step");
  sub->add_option("--lpnn-c0", o.lpnn_c0, "LPNN augmentation weight");
  sub->add_option("--lpnn-max-iters", o.lpnn_max_iters, "LPNN iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary sequence design by semidefinite relaxation and randomized rounding"};
  app.require_subcommand(1, 1);
  Options o;

  auto* design = app.add_subcommand("design", "solve the relaxation and round (JSON on stdout)");
  add_problem_flags(design, o);
  design->add_option("--score", o.score, "power | rho | chi");

  auto* oracle = app.add_subcommand("oracle", "exhaustive search for small n");
  add_problem_flags(oracle, o);
  oracle->add_option("--n-limit", o.n_limit, "largest n to enumerate");

  auto* shape = app.add_subcommand("shape", "SHAPE baseline");
  add_problem_flags(shape, o);
  shape->add_option("--variant", o.variant, "unimodular | binary");
  add_baseline_flags(shape, o);

  auto* lpnn = app.add_subcommand("lpnn", "LPNN baseline");
  add_problem_flags(lpnn, o);
  lpnn->add_option("--variant", o.variant, "unimodular | binary");
  add_baseline_flags(lpnn, o);

  auto* experiment = app.add_subcommand("experiment", "run an experiment harness and write CSV");
  add_problem_flags(experiment, o, false);
  experiment->add_option("--kind", o.kind, "experiment kind (overrides the config)");
  experiment->add_flag("--paper-scale", o.paper_scale, "full-size settings");
  experiment->add_flag("--timing", o.timing, "record wall-clock columns");
  experiment->add_option("--repetitions", o.repetitions, "configurations per sweep point");
  add_baseline_flags(experiment, o);

  auto* dump_sdp = app.add_subcommand("dump-sdp", "write the relaxation matrix as CSV");
  add_problem_flags(dump_sdp, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error exits 1.
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }
  if (o.jobs > 0) omp_set_num_threads(o.jobs);

  try {
    if (*design) return cmd_design(o);
    if (*oracle) return cmd_oracle(o);
    if (*shape) return cmd_shape(o);
    if (*lpnn) return cmd_lpnn(o);
    if (*experiment) return cmd_experiment(o);
    if (*dump_sdp) return cmd_dump_sdp(o);
  } catch (const std::exception& e) {
    std::cerr << "binseq: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
