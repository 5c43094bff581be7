#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "binseq/errors.hpp"
#include "binseq/experiments.hpp"
#include "binseq/rounding.hpp"
#include "support.hpp"

using namespace binseq;

namespace {

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_csv(r, out);
  return out.str();
}

double value_of(const ExperimentReport& r, std::string_view method, std::string_view stat, double sweep) {
  for (const ReportRow& row : select_rows(r, method, stat)) {
    if (row.sweep_value == sweep) return row.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ExperimentConfig small_alpha_config() {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::FeasibilityVsAlpha);
  cfg.problem.n = 32;
  cfg.problem.message = scale_band(BandSpec{24, 25, 26, 27, 28, 29}, 32);
  cfg.problem.interferer = scale_band(BandSpec{9, 10, 11, 12, 13, 14}, 32);
  cfg.problem.trials = 2000;
  cfg.sweep = {1.0, 2.0, 32.0};
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("band scaling") {
  CHECK(scale_band(BandSpec{9, 10, 11, 12, 13, 14}, 128) == BandSpec{9, 10, 11, 12, 13, 14});
  CHECK(scale_band(BandSpec{24, 25, 26, 27, 28, 29, 39, 40, 41, 42, 43, 44}, 64) == BandSpec{12, 13, 14, 20, 21, 22});
  // Widths never drop below one bin.
  CHECK(scale_band(BandSpec{40}, 32) == BandSpec{10});
}

TEST_CASE("default configurations") {
  const ExperimentConfig a = default_experiment_config(ExperimentKind::FeasibilityVsAlpha);
  CHECK(a.problem.n == 64);
  CHECK(a.problem.trials == 10000);
  CHECK(a.sweep.front() == 0.5);
  CHECK(a.sweep.back() == 5.0);
  const ExperimentConfig full = default_experiment_config(ExperimentKind::FeasibilityVsAlpha, true);
  CHECK(full.problem.n == 128);
  CHECK(full.problem.trials == 100000);
  CHECK(full.sweep.back() == 10.0);

  const ExperimentConfig o = default_experiment_config(ExperimentKind::OracleComparison);
  CHECK(o.problem.n == 16);
  CHECK(o.problem.alpha == 4.0);
  CHECK(o.sweep.back() == 4096.0);

  for (auto kind : {ExperimentKind::FeasibilityVsAlpha, ExperimentKind::FeasibilityVsWidth,
                    ExperimentKind::RatioHistogram, ExperimentKind::BetaDistribution,
                    ExperimentKind::OracleComparison, ExperimentKind::BaselineComparison}) {
    CHECK_NOTHROW(validate_experiment(default_experiment_config(kind)));
    CHECK_NOTHROW(validate_experiment(default_experiment_config(kind, true)));
    CHECK(parse_experiment_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_experiment_kind("Nope"), ConfigError);
}

TEST_CASE("validation rejects empty grids and bad repetitions") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::FeasibilityVsAlpha);
  cfg.sweep.clear();
  CHECK_THROWS_AS(validate_experiment(cfg), ConfigError);
  cfg = default_experiment_config(ExperimentKind::BaselineComparison);
  cfg.repetitions = 0;
  CHECK_THROWS_AS(validate_experiment(cfg), ConfigError);
  cfg = default_experiment_config(ExperimentKind::BetaDistribution);
  cfg.cells = {{8, 9, 1}};
  CHECK_THROWS_AS(validate_experiment(cfg), ConfigError);
}

TEST_CASE("oracle band configurations") {
  const auto configs = oracle_band_configurations(8);
  CHECK(configs.size() == 420);
  for (const auto& [m, i] : configs) {
    CHECK(m.size() == 2);
    CHECK(i.size() == 2);
    for (int k : m.indices()) CHECK_FALSE(i.contains(k));
  }
}

TEST_CASE("random correlation matrices") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd s = random_correlation_matrix(20, 3, rng);
  for (int i = 0; i < 20; ++i) CHECK(s(i, i) == 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
  int rank = 0;
  for (int k = 0; k < 20; ++k) rank += eig.eigenvalues()[k] > 1e-8 ? 1 : 0;
  CHECK(rank == 3);
  // Rank-one binary input gives beta = pi / 2.
  const Eigen::VectorXd v = BinarySequence{1, -1, 1, 1, -1, 1, -1, -1, 1, 1}.as_vector();
  const double b = beta_ratio(v * v.transpose(), gram(10, BandSpec{2, 3}));
  CHECK(b == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("feasibility vs alpha on a small problem") {
  const ExperimentConfig cfg = small_alpha_config();
  const ExperimentReport r = exp_feasibility_vs_alpha(cfg);
  CHECK(r.failures == 0);
  for (double a : cfg.sweep) {
    CHECK(value_of(r, "rounded", "feasibility_rate", a) >= value_of(r, "uniform", "feasibility_rate", a));
    CHECK(std::isfinite(value_of(r, "theory", "mcdiarmid_bound", a)));
  }
  CHECK(value_of(r, "rounded", "feasibility_rate", 32.0) == 1.0);
  CHECK(value_of(r, "uniform", "feasibility_rate", 32.0) == 1.0);
  CHECK(value_of(r, "rounded", "feasibility_rate", 1.0) <= value_of(r, "rounded", "feasibility_rate", 2.0) + 0.05);
}

TEST_CASE("feasibility vs width: zero width is always feasible") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::FeasibilityVsWidth);
  cfg.problem.n = 32;
  cfg.problem.message = BandSpec{1, 2, 3};
  cfg.problem.trials = 1000;
  cfg.sweep = {0.0, 2.0};
  const ExperimentReport r = exp_feasibility_vs_width(cfg);
  CHECK(value_of(r, "rounded", "feasibility_rate", 0.0) == 1.0);
  CHECK(value_of(r, "uniform", "feasibility_rate", 0.0) == 1.0);
  CHECK(value_of(r, "rounded", "feasibility_rate", 2.0) >= value_of(r, "uniform", "feasibility_rate", 2.0));
}

TEST_CASE("ratio histogram rows") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::RatioHistogram);
  cfg.problem.n = 32;
  cfg.problem.message = BandSpec{6, 7, 8};
  cfg.problem.interferer = BandSpec{2, 3};
  cfg.problem.alpha = 2.0;
  cfg.sweep = {2000};
  const ExperimentReport r = exp_ratio_histogram(cfg);
  CHECK(r.failures == 0);
  double counted = 0.0;
  for (const ReportRow& row : select_rows(r, "rounded", "count")) counted += row.value;
  CHECK(counted == value_of(r, "rounded", "n_feasible", 2000));
  CHECK(select_rows(r, "rounded", "count").size() == 30);
  CHECK(value_of(r, "eigenvector", "gamma", 2000) <= value_of(r, "rounded", "max_gamma", 2000) + 1e-12);
  CHECK(value_of(r, "uniform", "mean_gamma", 2000) < value_of(r, "rounded", "mean_gamma", 2000));
}

TEST_CASE("beta study rows") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::BetaDistribution);
  cfg.cells = {{16, 4, 4}};
  cfg.repetitions = 200;
  const ExperimentReport r = exp_beta_distribution(cfg);
  const auto frac = select_rows(r, "n16_K4_R4", "fraction_below_pi_minus_1");
  REQUIRE(frac.size() == 1);
  CHECK(frac[0].value >= 0.95);
  const auto cdf = select_rows(r, "n16_K4_R4", "cdf");
  for (std::size_t k = 1; k < cdf.size(); ++k) CHECK(cdf[k].value >= cdf[k - 1].value);
}

TEST_CASE("oracle comparison emits three ratios per trial count") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::OracleComparison);
  cfg.problem.n = 10;
  cfg.oracle_bins = 4;
  cfg.repetitions = 6;
  cfg.sweep = {8, 64};
  const ExperimentReport r = exp_oracle_comparison(cfg);
  for (const char* stat : {"power_ratio", "rho_ratio", "chi_ratio"}) {
    const auto rows = select_rows(r, "alg1", stat);
    CHECK(rows.size() == 2);
    for (const ReportRow& row : rows) {
      if (!std::isnan(row.value)) CHECK(row.value <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("baseline comparison on a small grid") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::BaselineComparison);
  cfg.problem.n = 32;
  cfg.problem.trials = 500;
  cfg.message_width = 4;
  cfg.sweep = {2};
  cfg.repetitions = 2;
  cfg.shape.max_iters = 200;
  cfg.lpnn.max_iters = 200;
  const ExperimentReport r = exp_baseline_comparison(cfg);
  for (const char* method : {"alg1", "shape_unimodular", "shape_binary", "lpnn_unimodular", "lpnn_binary",
                             "eigenvector"}) {
    CHECK(select_rows(r, method, "mean_rho").size() == 1);
    // Wall-clock columns stay empty unless timing is requested.
    CHECK(std::isnan(select_rows(r, method, "mean_seconds")[0].value));
  }
  CHECK(value_of(r, "shape_binary", "monotone_trace_rate", 2) == 1.0);
}

TEST_CASE("csv format") {
  ExperimentReport r;
  r.kind = ExperimentKind::BetaDistribution;
  r.metadata = {{"kind", "BetaDistribution"}, {"note", "a,b \"c\""}};
  r.rows.push_back({"cell", 0.5, "m", "s", std::numeric_limits<double>::quiet_NaN(), kInfinity});
  r.rows.push_back({"cell", 1.0, "m", "s", 0.1, -kInfinity});
  const std::string csv = csv_of(r);
  CHECK(csv ==
        "kind,note,sweep,sweep_value,method,statistic,value,std_error\r\n"
        "BetaDistribution,\"a,b \"\"c\"\"\",cell,0.5,m,s,,inf\r\n"
        "BetaDistribution,\"a,b \"\"c\"\"\",cell,1,m,s,0.10000000000000001,-inf\r\n");
}

TEST_CASE("csv files are named by kind and seed") {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::BetaDistribution);
  cfg.cells = {{8, 2, 2}};
  cfg.repetitions = 10;
  cfg.seed = 42;
  const ExperimentReport r = run_experiment(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "binseq_test_csv";
  std::filesystem::remove_all(dir);
  const auto path = write_csv_file(r, cfg, dir);
  CHECK(path.filename() == "BetaDistribution_42.csv");
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csv_of(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("reports are reproducible and independent of the thread count") {
  const ExperimentConfig cfg = small_alpha_config();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string one = csv_of(run_experiment(cfg));
  omp_set_num_threads(4);
  const std::string four = csv_of(run_experiment(cfg));
  const std::string again = csv_of(run_experiment(cfg));
  omp_set_num_threads(saved);
  CHECK(one == four);
  CHECK(four == again);

  ExperimentConfig oc = default_experiment_config(ExperimentKind::OracleComparison);
  oc.problem.n = 10;
  oc.oracle_bins = 4;
  oc.repetitions = 4;
  oc.sweep = {16, 32};
  omp_set_num_threads(1);
  const std::string a = csv_of(run_experiment(oc));
  omp_set_num_threads(3);
  const std::string b = csv_of(run_experiment(oc));
  omp_set_num_threads(saved);
  CHECK(a == b);
}

TEST_CASE("metadata echoes the configuration") {
  const ExperimentConfig cfg = small_alpha_config();
  const ExperimentReport r = run_experiment(cfg);
  bool has_version = false, has_seed = false;
  for (const auto& [k, v] : r.metadata) {
    if (k == "version") has_version = v == kVersion;
    if (k == "seed") has_seed = v == "3";
  }
  CHECK(has_version);
  CHECK(has_seed);
}
