#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "binseq/baselines.hpp"
#include "binseq/experiments.hpp"
#include "binseq/oracle.hpp"
#include "binseq/problem.hpp"
#include "binseq/rounding.hpp"
#include "binseq/sdp.hpp"

namespace binseq {

using Json = nlohmann::json;  // std::map objects: keys come out sorted

/// Finite numbers as numbers, +/-inf as "Infinity"/"-Infinity", NaN as null.
Json number_to_json(double v);
double number_from_json(const Json& j);

Json problem_to_json(const DesignProblem& p);
/// Requires n, message, interferer, alpha, trials and seed; throws ConfigError.
DesignProblem problem_from_json(const Json& j);

Json metrics_to_json(const MetricBundle& m);
Json sequence_to_json(const BinarySequence& s);
/// "1 -1 ..." as space-separated integers on one line.
std::string sequence_line(const BinarySequence& s);

Json relaxation_summary_to_json(const SdpSolution& sol);
Json design_result_to_json(const DesignResult& r);
Json oracle_result_to_json(const OracleResult& r);
Json baseline_result_to_json(const BaselineResult& r, Variant variant);

/// Experiment config file: {"kind": ..., optional "paper_scale", "problem",
/// "sweep", "repetitions", "seed", "cells", "message_width", "oracle_bins"}.
/// Missing fields take the defaults of the kind.
ExperimentConfig experiment_from_json(const Json& j);
Json experiment_to_json(const ExperimentConfig& cfg);

/// Row-major CSV with 17 significant digits.
void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);

Json read_json_file(const std::string& path);

}  // namespace binseq
