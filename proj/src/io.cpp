#include "binseq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "binseq/errors.hpp"

namespace binseq {

Json number_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "Infinity") return kInfinity;
    if (s == "-Infinity") return -kInfinity;
    throw ConfigError("expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw ConfigError("expected a number");
  return j.get<double>();
}

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw ConfigError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
  return *it;
}

BandSpec band_from_json(const Json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of integers");
  std::vector<int> bins;
  for (const Json& v : j) {
    if (!v.is_number_integer()) {
      throw ConfigError(std::string("'") + key + "' must be an array of integers");
    }
    bins.push_back(v.get<int>());
  }
  return BandSpec(std::move(bins));
}

template <class T>
T integer_from_json(const Json& j, const char* key) {
  if (!j.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return j.get<T>();
}

}  // namespace

Json problem_to_json(const DesignProblem& p) {
  return Json{{"n", p.n},
              {"message", p.message.indices()},
              {"interferer", p.interferer.indices()},
              {"alpha", p.alpha},
              {"trials", p.trials},
              {"seed", p.seed}};
}

DesignProblem problem_from_json(const Json& j) {
  DesignProblem p;
  p.n = integer_from_json<int>(require(j, "n"), "n");
  p.message = band_from_json(require(j, "message"), "message");
  p.interferer = band_from_json(require(j, "interferer"), "interferer");
  const Json& alpha = require(j, "alpha");
  if (!alpha.is_number()) throw ConfigError("'alpha' must be a number");
  p.alpha = alpha.get<double>();
  p.trials = integer_from_json<std::int64_t>(require(j, "trials"), "trials");
  const Json& seed = require(j, "seed");
  if (!seed.is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
  p.seed = seed.get<std::uint64_t>();
  return p;
}

Json metrics_to_json(const MetricBundle& m) {
  return Json{{"message_power", number_to_json(m.message_power)},
              {"interferer_power", number_to_json(m.interferer_power)},
              {"rejection_ratio", number_to_json(m.rejection_ratio)},
              {"reciprocal_dynamic_range", number_to_json(m.reciprocal_dynamic_range)},
              {"feasible", m.feasible}};
}

Json sequence_to_json(const BinarySequence& s) {
  Json out = Json::array();
  for (auto e : s.entries()) out.push_back(static_cast<int>(e));
  return out;
}

std::string sequence_line(const BinarySequence& s) {
  std::string out;
  for (auto e : s.entries()) {
    if (!out.empty()) out += ' ';
    out += e > 0 ? "1" : "-1";
  }
  return out;
}

Json relaxation_summary_to_json(const SdpSolution& sol) {
  return Json{{"objective", number_to_json(sol.objective)},
              {"interferer_trace", number_to_json(sol.interferer_trace)},
              {"rank", sol.rank},
              {"kkt_residual", number_to_json(sol.kkt_residual)},
              {"dual_multiplier", number_to_json(sol.dual_multiplier)},
              {"inner_solves", sol.inner_solves},
              {"admm_iterations", sol.admm_iterations}};
}

Json design_result_to_json(const DesignResult& r) {
  Json best = nullptr;
  if (r.best) {
    best = Json{{"sequence", sequence_to_json(r.best->sequence)},
                {"sequence_line", sequence_line(r.best->sequence)},
                {"metrics", metrics_to_json(r.best->metrics)},
                {"trial_index", r.best->trial_index},
                {"gamma", r.best->gamma ? number_to_json(*r.best->gamma) : Json(nullptr)}};
  }
  return Json{{"best", best},
              {"n_feasible", r.n_feasible},
              {"n_trials", r.n_trials},
              {"feasibility_rate", number_to_json(r.feasibility_rate)},
              {"gamma_min_feasible", number_to_json(r.gamma_min_feasible)},
              {"beta", number_to_json(r.beta)},
              {"score_kind", std::string(to_string(r.score_kind))}};
}

Json oracle_result_to_json(const OracleResult& r) {
  auto best = [](const OracleBest& b) {
    return Json{{"sequence", sequence_to_json(b.sequence)},
                {"sequence_line", sequence_line(b.sequence)},
                {"metrics", metrics_to_json(b.metrics)}};
  };
  return Json{{"best_by_power", best(r.best_by_power)},
              {"best_by_rho", best(r.best_by_rho)},
              {"best_by_chi", best(r.best_by_chi)},
              {"n_feasible", r.n_feasible},
              {"n_enumerated", r.n_enumerated}};
}

Json baseline_result_to_json(const BaselineResult& r, Variant variant) {
  Json seq = Json::array();
  for (Eigen::Index i = 0; i < r.sequence.size(); ++i) {
    if (variant == Variant::Binary) {
      seq.push_back(r.sequence[i].real() < 0.0 ? -1 : 1);
    } else {
      seq.push_back(Json::array({r.sequence[i].real(), r.sequence[i].imag()}));
    }
  }
  return Json{{"variant", std::string(to_string(variant))},
              {"sequence", seq},
              {"metrics", metrics_to_json(r.metrics)},
              {"iterations", r.iterations},
              {"final_trace_value",
               r.objective_trace.empty() ? Json(nullptr) : number_to_json(r.objective_trace.back())}};
}

ExperimentConfig experiment_from_json(const Json& j) {
  const Json& kind = require(j, "kind");
  if (!kind.is_string()) throw ConfigError("'kind' must be a string");
  bool paper_scale = false;
  if (j.contains("paper_scale")) {
    if (!j["paper_scale"].is_boolean()) throw ConfigError("'paper_scale' must be a boolean");
    paper_scale = j["paper_scale"].get<bool>();
  }
  ExperimentConfig cfg = default_experiment_config(parse_experiment_kind(kind.get<std::string>()), paper_scale);
  if (j.contains("problem")) {
    const Json& p = j["problem"];
    if (!p.is_object()) throw ConfigError("'problem' must be an object");
    // Partial problems override the defaults field by field.
    Json merged = problem_to_json(cfg.problem);
    for (auto it = p.begin(); it != p.end(); ++it) merged[it.key()] = it.value();
    cfg.problem = problem_from_json(merged);
  }
  if (j.contains("sweep")) {
    cfg.sweep.clear();
    if (!j["sweep"].is_array()) throw ConfigError("'sweep' must be an array of numbers");
    for (const Json& v : j["sweep"]) {
      if (!v.is_number()) throw ConfigError("'sweep' must be an array of numbers");
      cfg.sweep.push_back(v.get<double>());
    }
  }
  if (j.contains("cells")) {
    cfg.cells.clear();
    if (!j["cells"].is_array()) throw ConfigError("'cells' must be an array of [n, K, R]");
    for (const Json& c : j["cells"]) {
      if (!c.is_array() || c.size() != 3 || !c[0].is_number_integer() ||
          !c[1].is_number_integer() || !c[2].is_number_integer()) {
        throw ConfigError("'cells' must be an array of [n, K, R]");
      }
      cfg.cells.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
    }
  }
  if (j.contains("repetitions")) cfg.repetitions = integer_from_json<int>(j["repetitions"], "repetitions");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("message_width")) {
    cfg.message_width = integer_from_json<int>(j["message_width"], "message_width");
  }
  if (j.contains("oracle_bins")) cfg.oracle_bins = integer_from_json<int>(j["oracle_bins"], "oracle_bins");
  validate_experiment(cfg);
  return cfg;
}

Json experiment_to_json(const ExperimentConfig& cfg) {
  Json cells = Json::array();
  for (const BetaCell& c : cfg.cells) cells.push_back({c.n, c.width, c.rank});
  return Json{{"kind", std::string(to_string(cfg.kind))},
              {"problem", problem_to_json(cfg.problem)},
              {"sweep", cfg.sweep},
              {"cells", cells},
              {"repetitions", cfg.repetitions},
              {"seed", cfg.seed},
              {"message_width", cfg.message_width},
              {"oracle_bins", cfg.oracle_bins}};
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, k));
      if (k > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace binseq
