#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "binseq/baselines.hpp"
#include "binseq/problem.hpp"
#include "binseq/sdp.hpp"

namespace binseq {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind {
  FeasibilityVsAlpha,
  FeasibilityVsWidth,
  RatioHistogram,
  BetaDistribution,
  OracleComparison,
  BaselineComparison,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// (n, K, R) cell of the beta study.
struct BetaCell {
  int n = 0;
  int width = 0;
  int rank = 0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::FeasibilityVsAlpha;
  DesignProblem problem;       // base problem; trials = L
  std::vector<double> sweep;   // alphas, widths, or L values
  std::vector<BetaCell> cells; // BetaDistribution only
  int repetitions = 20;        // configurations / draws per sweep point
  std::uint64_t seed = 0;
  int message_width = 10;      // BaselineComparison
  int oracle_bins = 8;         // OracleComparison draws bands from bins 1..oracle_bins
  ShapeOptions shape;
  LpnnOptions lpnn;
  SolverConfig solver;
  bool timing = false;         // wall-clock columns are left empty unless set
};

struct ReportRow {
  std::string sweep;        // name of the swept parameter
  double sweep_value = 0.0;
  std::string method;
  std::string statistic;
  double value = 0.0;       // NaN: not measured
  double std_error = 0.0;   // NaN: not applicable
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::FeasibilityVsAlpha;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;  // config echo
  std::int64_t failures = 0;
};

/// Band index sets given for n = 128, scaled to n (run starts by n/128,
/// rounded; widths likewise, at least 1).
BandSpec scale_band(const BandSpec& band128, int n);

/// Desk-scale defaults (n = 64, L = 1e4, 20 repetitions) or the full settings.
ExperimentConfig default_experiment_config(ExperimentKind kind, bool paper_scale = false);

/// Throws ConfigError on an empty sweep, repetitions < 1 or malformed cells.
void validate_experiment(const ExperimentConfig& cfg);

ExperimentReport exp_feasibility_vs_alpha(const ExperimentConfig& cfg);
ExperimentReport exp_feasibility_vs_width(const ExperimentConfig& cfg);
ExperimentReport exp_ratio_histogram(const ExperimentConfig& cfg);
ExperimentReport exp_beta_distribution(const ExperimentConfig& cfg);
ExperimentReport exp_oracle_comparison(const ExperimentConfig& cfg);
ExperimentReport exp_baseline_comparison(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Random unit-diagonal PSD matrix of rank <= `rank`: G G^T with G standard
/// normal (n x rank), rescaled to unit diagonal.
Eigen::MatrixXd random_correlation_matrix(int n, int rank, std::mt19937_64& rng);

/// The band configurations of the oracle comparison: two message and two
/// interferer bins drawn from 1..bins, in lexicographic order.
std::vector<std::pair<BandSpec, BandSpec>> oracle_band_configurations(int bins = 8);

/// Rows of the report with matching method and statistic, in report order.
std::vector<ReportRow> select_rows(const ExperimentReport& report, std::string_view method,
                                   std::string_view statistic);

void write_csv(const ExperimentReport& report, std::ostream& out);
/// Writes <dir>/<kind>_<seed>.csv and returns its path.
std::filesystem::path write_csv_file(const ExperimentReport& report, const ExperimentConfig& cfg,
                                     const std::filesystem::path& dir);

}  // namespace binseq
