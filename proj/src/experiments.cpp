#include "binseq/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>

#include "binseq/errors.hpp"
#include "binseq/oracle.hpp"
#include "binseq/rounding.hpp"
#include "binseq/spectral.hpp"

namespace binseq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kUniformSalt = 0x5851f42d4c957f2dULL;
constexpr std::uint64_t kCellSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::int64_t kTrialBlock = 1024;
constexpr int kHistogramBins = 30;
// Rejection ratios are capped before averaging so a single perfect null
// does not make the mean infinite.
constexpr double kRhoCap = 1e6;

// Fixed-size blocks evaluated in parallel and reduced in block order, so
// floating-point sums do not depend on the thread count.
template <class Result, class Fn>
std::vector<Result> run_blocks(std::int64_t total, std::int64_t block, Fn fn) {
  const std::int64_t count = total <= 0 ? 0 : (total + block - 1) / block;
  std::vector<Result> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < count; ++b) {
    try {
      out[static_cast<std::size_t>(b)] = fn(b * block, std::min(total, (b + 1) * block));
    } catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Independent jobs; per-job errors are kept as messages instead of thrown.
template <class Result, class Fn>
std::vector<std::pair<Result, std::string>> run_jobs(std::size_t count, Fn fn) {
  std::vector<std::pair<Result, std::string>> out(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < count; ++j) {
    try {
      out[j].first = fn(j);
    } catch (const std::exception& e) {
      out[j].second = e.what();
      if (out[j].second.empty()) out[j].second = "error";
    }
  }
  return out;
}

double binomial_se(double rate, double count) {
  return count > 0 ? std::sqrt(std::max(0.0, rate * (1.0 - rate)) / count) : kNaN;
}

struct MeanSe {
  double mean = kNaN;
  double se = kNaN;
  std::size_t count = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe m;
  m.count = xs.size();
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

std::string join_bins(const BandSpec& band) {
  std::string out;
  for (int k : band.indices()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(k);
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentReport make_report(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.kind;
  std::ostringstream options;
  options << "message_width=" << cfg.message_width << ";oracle_bins=" << cfg.oracle_bins
          << ";shape_max_iters=" << cfg.shape.max_iters << ";lpnn_step=" << format_number(cfg.lpnn.step)
          << ";lpnn_c0=" << format_number(cfg.lpnn.c0) << ";lpnn_max_iters=" << cfg.lpnn.max_iters;
  std::string cells;
  for (const BetaCell& c : cfg.cells) {
    if (!cells.empty()) cells += ' ';
    cells += std::to_string(c.n) + "/" + std::to_string(c.width) + "/" + std::to_string(c.rank);
  }
  if (!cells.empty()) options << ";cells=" << cells;
  r.metadata = {
      {"kind", std::string(to_string(cfg.kind))},
      {"seed", std::to_string(cfg.seed)},
      {"version", std::string(kVersion)},
      {"n", std::to_string(cfg.problem.n)},
      {"alpha", format_number(cfg.problem.alpha)},
      {"trials", std::to_string(cfg.problem.trials)},
      {"repetitions", std::to_string(cfg.repetitions)},
      {"message", join_bins(cfg.problem.message)},
      {"interferer", join_bins(cfg.problem.interferer)},
      {"options", options.str()},
  };
  return r;
}

void add_row(ExperimentReport& r, std::string sweep, double sweep_value, std::string method,
             std::string statistic, double value, double se = kNaN) {
  r.rows.push_back({std::move(sweep), sweep_value, std::move(method), std::move(statistic), value, se});
}

void add_failure(ExperimentReport& r, const std::string& sweep, double sweep_value,
                 const std::string& method, const std::string& message) {
  add_row(r, sweep, sweep_value, method, "FAILED: " + message, kNaN);
  ++r.failures;
}

BinarySequence uniform_sequence(int n, std::uint64_t seed, std::int64_t trial) {
  auto rng = trial_stream(seed ^ kUniformSalt, static_cast<std::uint64_t>(trial));
  std::vector<std::int8_t> e(static_cast<std::size_t>(n));
  std::uint64_t bits = 0;
  for (int i = 0; i < n; ++i) {
    if (i % 64 == 0) bits = rng();
    e[static_cast<std::size_t>(i)] = ((bits >> (i % 64)) & 1U) ? -1 : 1;
  }
  return BinarySequence(std::move(e));
}

// ------------------------------------------------------ feasibility curves

struct FeasibilityCounts {
  std::int64_t rounded = 0;
  std::int64_t exceed = 0;
  std::int64_t uniform = 0;
};

void feasibility_rows(ExperimentReport& r, const ExperimentConfig& cfg, const DesignProblem& p,
                      const std::string& sweep, double value) {
  const SdpSolution sol = solve_relaxation(p, cfg.solver);
  const double beta = p.interferer.empty() ? kNaN : beta_ratio(sol, gram(p.n, p.interferer));
  const double threshold = std::isnan(beta) ? kInfinity : (beta + 1.0) * p.alpha / std::numbers::pi;
  const BandEvaluator eval(p);

  const auto blocks = run_blocks<FeasibilityCounts>(
      p.trials, kTrialBlock, [&](std::int64_t lo, std::int64_t hi) {
        FeasibilityCounts c;
        for (std::int64_t t = lo; t < hi; ++t) {
          const MetricBundle m = eval.evaluate(sample_trial(sol, p.seed, t));
          c.rounded += m.feasible ? 1 : 0;
          c.exceed += m.interferer_power >= threshold ? 1 : 0;
          c.uniform += eval.evaluate(uniform_sequence(p.n, p.seed, t)).feasible ? 1 : 0;
        }
        return c;
      });
  FeasibilityCounts total;
  for (const auto& b : blocks) {
    total.rounded += b.rounded;
    total.exceed += b.exceed;
    total.uniform += b.uniform;
  }
  const double l = static_cast<double>(p.trials);
  const double rounded = static_cast<double>(total.rounded) / l;
  const double uniform = static_cast<double>(total.uniform) / l;
  const double exceed = static_cast<double>(total.exceed) / l;
  add_row(r, sweep, value, "rounded", "feasibility_rate", rounded, binomial_se(rounded, l));
  add_row(r, sweep, value, "uniform", "feasibility_rate", uniform, binomial_se(uniform, l));
  if (!p.interferer.empty()) {
    add_row(r, sweep, value, "rounded", "exceedance_rate", exceed, binomial_se(exceed, l));
    add_row(r, sweep, value, "rounded", "exceedance_threshold", threshold);
    add_row(r, sweep, value, "rounded", "beta", beta);
    add_row(r, sweep, value, "theory", "mcdiarmid_bound", mcdiarmid_bound(p));
  }
  add_row(r, sweep, value, "relaxation", "objective", sol.objective);
  add_row(r, sweep, value, "relaxation", "interferer_trace", sol.interferer_trace);
}

int width_band_start(int n) {
  return static_cast<int>(std::lround(19.0 * n / 128.0));
}

// ---------------------------------------------------------- ratio histogram

struct GammaTally {
  std::array<std::int64_t, kHistogramBins> hist{};
  std::int64_t feasible = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double min = kInfinity;
  double max = -kInfinity;

  void add(double g) {
    const int bin = std::clamp(static_cast<int>(std::floor(g * kHistogramBins)), 0, kHistogramBins - 1);
    ++hist[static_cast<std::size_t>(bin)];
    ++feasible;
    sum += g;
    sum_sq += g * g;
    min = std::min(min, g);
    max = std::max(max, g);
  }
  void merge(const GammaTally& o) {
    for (int b = 0; b < kHistogramBins; ++b) hist[static_cast<std::size_t>(b)] += o.hist[static_cast<std::size_t>(b)];
    feasible += o.feasible;
    sum += o.sum;
    sum_sq += o.sum_sq;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
};

void gamma_rows(ExperimentReport& r, const std::string& method, const GammaTally& t, double trials) {
  for (int b = 0; b < kHistogramBins; ++b) {
    add_row(r, "gamma_bin", static_cast<double>(b) / kHistogramBins, method, "count",
            static_cast<double>(t.hist[static_cast<std::size_t>(b)]));
  }
  const double n = static_cast<double>(t.feasible);
  add_row(r, "trials", trials, method, "n_feasible", n);
  if (t.feasible == 0) return;
  const double mean = t.sum / n;
  const double var = t.feasible > 1 ? std::max(0.0, (t.sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  add_row(r, "trials", trials, method, "mean_gamma", mean, std::sqrt(var / n));
  add_row(r, "trials", trials, method, "min_gamma", t.min);
  add_row(r, "trials", trials, method, "max_gamma", t.max);
}

// -------------------------------------------------------- oracle comparison

double metric_ratio(double alg, double opt) {
  if (std::isinf(opt)) return std::isinf(alg) ? 1.0 : 0.0;
  if (opt <= 0.0) return 1.0;  // every feasible sequence scores 0
  return alg / opt;
}

struct OracleJob {
  bool skipped = false;
  // per sweep point: power, rho, chi ratios and the exact power match flag
  std::vector<std::array<double, 4>> values;
};

// ------------------------------------------------------ baseline comparison

constexpr std::array<std::string_view, 6> kBaselineMethods = {
    "alg1", "shape_unimodular", "shape_binary", "lpnn_unimodular", "lpnn_binary", "eigenvector"};

struct BaselineJob {
  std::array<double, 6> rho{};
  std::array<double, 6> seconds{};
  std::array<std::string, 6> error;
  std::array<bool, 6> monotone{};  // SHAPE runs: trace never increased
};

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] + 1e-9 * std::max(1.0, std::abs(trace[i - 1]))) return false;
  }
  return true;
}

std::pair<BandSpec, BandSpec> random_bands(int n, int message_width, int interferer_width,
                                           std::mt19937_64& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n / 2 - 1));
  std::iota(pool.begin(), pool.end(), 1);
  for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::vector<int> m(pool.begin(), pool.begin() + message_width);
  std::vector<int> k(pool.begin() + message_width, pool.begin() + message_width + interferer_width);
  return {BandSpec(std::move(m)), BandSpec(std::move(k))};
}

double capped(double rho) { return std::min(rho, kRhoCap); }

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::FeasibilityVsAlpha: return "FeasibilityVsAlpha";
    case ExperimentKind::FeasibilityVsWidth: return "FeasibilityVsWidth";
    case ExperimentKind::RatioHistogram: return "RatioHistogram";
    case ExperimentKind::BetaDistribution: return "BetaDistribution";
    case ExperimentKind::OracleComparison: return "OracleComparison";
    case ExperimentKind::BaselineComparison: return "BaselineComparison";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::FeasibilityVsAlpha, ExperimentKind::FeasibilityVsWidth,
                 ExperimentKind::RatioHistogram, ExperimentKind::BetaDistribution,
                 ExperimentKind::OracleComparison, ExperimentKind::BaselineComparison}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(text) + "'");
}

BandSpec scale_band(const BandSpec& band128, int n) {
  const auto& idx = band128.indices();
  std::vector<int> out;
  const double factor = static_cast<double>(n) / 128.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && idx[j + 1] == idx[j] + 1) ++j;
    const int start = static_cast<int>(std::lround(idx[i] * factor));
    const int width =
        std::max(1, static_cast<int>(std::lround(static_cast<double>(j - i + 1) * factor)));
    for (int k = 0; k < width; ++k) {
      if (out.empty() || start + k > out.back()) out.push_back(start + k);
    }
    i = j + 1;
  }
  return BandSpec(std::move(out));
}

ExperimentConfig default_experiment_config(ExperimentKind kind, bool paper_scale) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  const int n = paper_scale ? 128 : 64;
  DesignProblem& p = cfg.problem;
  p.n = n;
  p.trials = 10000;
  std::vector<int> m, i;
  switch (kind) {
    case ExperimentKind::FeasibilityVsAlpha:
    case ExperimentKind::RatioHistogram: {
      for (int k = 24; k <= 29; ++k) m.push_back(k);
      for (int k = 39; k <= 44; ++k) m.push_back(k);
      for (int k = 9; k <= 14; ++k) i.push_back(k);
      for (int k = 49; k <= 54; ++k) i.push_back(k);
      p.message = scale_band(BandSpec(m), n);
      p.interferer = scale_band(BandSpec(i), n);
      if (kind == ExperimentKind::FeasibilityVsAlpha) {
        p.alpha = 5.0;
        const double top = paper_scale ? 10.0 : 5.0;
        for (double a = 0.5; a <= top + 1e-12; a += 0.5) cfg.sweep.push_back(a);
        if (paper_scale) p.trials = 100000;
      } else {
        p.alpha = 5.0;
        cfg.sweep = {static_cast<double>(paper_scale ? 1000000 : 10000)};
        if (paper_scale) p.trials = 1000000;
      }
      cfg.repetitions = 1;
      break;
    }
    case ExperimentKind::FeasibilityVsWidth: {
      for (int k = 0; k <= 9; ++k) m.push_back(k);
      for (int k = 49; k <= 59; ++k) m.push_back(k);
      p.message = scale_band(BandSpec(m), n);
      p.alpha = 3.0;
      const int top = paper_scale ? 20 : 10;
      for (int w = 1; w <= top; ++w) cfg.sweep.push_back(w);
      if (paper_scale) p.trials = 100000;
      cfg.repetitions = 1;
      break;
    }
    case ExperimentKind::BetaDistribution: {
      cfg.cells = {{32, 4, 4}, {32, 8, 8}, {64, 8, 8}, {64, 16, 16}};
      if (paper_scale) {
        cfg.cells.push_back({128, 12, 12});
        cfg.cells.push_back({128, 24, 24});
      }
      cfg.sweep = {0.0};
      cfg.repetitions = 1000;
      p.message = BandSpec{1};
      p.alpha = 0.0;
      break;
    }
    case ExperimentKind::OracleComparison: {
      p.n = 16;
      p.alpha = 4.0;
      p.message = BandSpec{1, 2};
      p.interferer = BandSpec{3, 4};
      cfg.sweep = {16, 64, 256, 1024, 4096};
      if (paper_scale) {
        cfg.sweep.push_back(16384);
        cfg.sweep.push_back(32768);
      }
      p.trials = static_cast<std::int64_t>(cfg.sweep.back());
      cfg.repetitions = 420;
      break;
    }
    case ExperimentKind::BaselineComparison: {
      p.alpha = 3.0;
      p.message = BandSpec::contiguous(1, cfg.message_width);
      for (int w = 1; w <= 10; ++w) cfg.sweep.push_back(w);
      cfg.repetitions = paper_scale ? 100 : 20;
      if (paper_scale) p.trials = 100000;
      break;
    }
  }
  return cfg;
}

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (cfg.kind == ExperimentKind::BetaDistribution) {
    if (cfg.cells.empty()) throw ConfigError("beta study needs at least one (n, K, R) cell");
    for (const BetaCell& c : cfg.cells) {
      if (c.n < 1 || c.width < 1 || c.width > c.n || c.rank < 1) {
        throw ConfigError("invalid beta cell (" + std::to_string(c.n) + ", " +
                          std::to_string(c.width) + ", " + std::to_string(c.rank) + ")");
      }
    }
    return;
  }
  if (cfg.sweep.empty()) throw ConfigError("sweep grid is empty");
  const DesignProblem& p = cfg.problem;
  switch (cfg.kind) {
    case ExperimentKind::FeasibilityVsAlpha:
      validate_problem(p);
      for (double a : cfg.sweep) {
        if (!(a >= 0.0)) throw ConfigError("alpha grid values must be nonnegative");
      }
      break;
    case ExperimentKind::FeasibilityVsWidth: {
      validate_problem(DesignProblem{p.n, p.message, {}, p.alpha, p.trials, p.seed});
      for (double w : cfg.sweep) {
        if (w < 0 || w != std::floor(w)) throw ConfigError("width grid values must be whole numbers");
        if (width_band_start(p.n) + static_cast<int>(w) > p.n) {
          throw ConfigError("interferer width " + std::to_string(static_cast<int>(w)) +
                            " does not fit in n = " + std::to_string(p.n));
        }
      }
      break;
    }
    case ExperimentKind::RatioHistogram:
      validate_problem(p);
      break;
    case ExperimentKind::OracleComparison:
      if (p.n > kOracleLimit) throw SizeLimitError("oracle comparison needs n <= 24");
      if (cfg.oracle_bins < 4 || cfg.oracle_bins > p.n - 1) {
        throw ConfigError("oracle_bins must lie in [4, n - 1]");
      }
      if (!(p.alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
      for (double l : cfg.sweep) {
        if (l < 1 || l != std::floor(l)) throw ConfigError("trial grid values must be positive integers");
      }
      break;
    case ExperimentKind::BaselineComparison:
      if (!(p.alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
      if (p.trials <= 0) throw ConfigError("trials must be positive");
      for (double w : cfg.sweep) {
        if (w < 1 || w != std::floor(w)) throw ConfigError("width grid values must be positive integers");
        if (cfg.message_width < 1 || cfg.message_width + static_cast<int>(w) > p.n / 2 - 1) {
          throw ConfigError("message and interferer widths do not fit in bins 1..n/2-1");
        }
      }
      break;
    case ExperimentKind::BetaDistribution:
      break;
  }
}

ExperimentReport exp_feasibility_vs_alpha(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentReport r = make_report(cfg);
  for (double alpha : cfg.sweep) {
    DesignProblem p = cfg.problem;
    p.alpha = alpha;
    p.seed = cfg.seed;
    try {
      feasibility_rows(r, cfg, p, "alpha", alpha);
    } catch (const Error& e) {
      add_failure(r, "alpha", alpha, "rounded", e.what());
    }
  }
  return r;
}

ExperimentReport exp_feasibility_vs_width(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentReport r = make_report(cfg);
  const int start = width_band_start(cfg.problem.n);
  for (double w : cfg.sweep) {
    DesignProblem p = cfg.problem;
    p.interferer = BandSpec::contiguous(start, static_cast<int>(w));
    p.seed = cfg.seed;
    try {
      feasibility_rows(r, cfg, p, "width", w);
    } catch (const Error& e) {
      add_failure(r, "width", w, "rounded", e.what());
    }
  }
  return r;
}

ExperimentReport exp_ratio_histogram(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentReport r = make_report(cfg);
  for (double trials : cfg.sweep) {
    DesignProblem p = cfg.problem;
    p.trials = static_cast<std::int64_t>(trials);
    p.seed = cfg.seed;
    try {
      const SdpSolution sol = solve_relaxation(p, cfg.solver);
      if (!(sol.objective > 1e-12)) throw DegenerateObjectiveError("relaxation objective is zero");
      const BandEvaluator eval(p);
      const auto blocks = run_blocks<std::pair<GammaTally, GammaTally>>(
          p.trials, kTrialBlock, [&](std::int64_t lo, std::int64_t hi) {
            std::pair<GammaTally, GammaTally> t;
            for (std::int64_t i = lo; i < hi; ++i) {
              const MetricBundle m = eval.evaluate(sample_trial(sol, p.seed, i));
              if (m.feasible) t.first.add(m.message_power / sol.objective);
              const MetricBundle u = eval.evaluate(uniform_sequence(p.n, p.seed, i));
              if (u.feasible) t.second.add(u.message_power / sol.objective);
            }
            return t;
          });
      GammaTally rounded, uniform;
      for (const auto& b : blocks) {
        rounded.merge(b.first);
        uniform.merge(b.second);
      }
      gamma_rows(r, "rounded", rounded, trials);
      gamma_rows(r, "uniform", uniform, trials);
      const Candidate eig = quantized_principal_eigenvector(p, sol);
      add_row(r, "trials", trials, "eigenvector", "gamma", *eig.gamma);
      add_row(r, "trials", trials, "eigenvector", "feasible", eig.metrics.feasible ? 1.0 : 0.0);
      add_row(r, "trials", trials, "theory", "gamma_lower_bound", std::numbers::pi / 2.0 - 1.0);
      add_row(r, "trials", trials, "relaxation", "objective", sol.objective);
    } catch (const Error& e) {
      add_failure(r, "trials", trials, "rounded", e.what());
    }
  }
  return r;
}

Eigen::MatrixXd random_correlation_matrix(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::MatrixXd s = g * g.transpose();
  Eigen::VectorXd inv(n);
  for (int i = 0; i < n; ++i) inv[i] = s(i, i) > 0.0 ? 1.0 / std::sqrt(s(i, i)) : 0.0;
  s = inv.asDiagonal() * s * inv.asDiagonal();
  for (int i = 0; i < n; ++i) s(i, i) = 1.0;
  return s;
}

ExperimentReport exp_beta_distribution(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentReport r = make_report(cfg);
  const double threshold = std::numbers::pi - 1.0;
  for (std::size_t c = 0; c < cfg.cells.size(); ++c) {
    const BetaCell cell = cfg.cells[c];
    const std::string label = "n" + std::to_string(cell.n) + "_K" + std::to_string(cell.width) +
                              "_R" + std::to_string(cell.rank);
    const std::uint64_t cell_seed = cfg.seed ^ (kCellSalt * (c + 1));
    const auto betas = run_blocks<double>(cfg.repetitions, 1, [&](std::int64_t d, std::int64_t) {
      auto rng = trial_stream(cell_seed, static_cast<std::uint64_t>(d));
      const Eigen::MatrixXd s = random_correlation_matrix(cell.n, cell.rank, rng);
      std::uniform_int_distribution<int> start(0, cell.n - cell.width);
      const BandSpec band = BandSpec::contiguous(start(rng), cell.width);
      return beta_ratio(s, gram(cell.n, band));
    });
    const double draws = static_cast<double>(betas.size());
    const double cv = static_cast<double>(c);
    std::int64_t below = 0, nonfinite = 0;
    for (double b : betas) {
      below += b < threshold ? 1 : 0;
      nonfinite += std::isfinite(b) ? 0 : 1;
    }
    const double frac = static_cast<double>(below) / draws;
    add_row(r, "cell", cv, label, "fraction_below_pi_minus_1", frac, binomial_se(frac, draws));
    add_row(r, "cell", cv, label, "nonfinite", static_cast<double>(nonfinite));
    std::vector<double> sorted = betas;
    std::sort(sorted.begin(), sorted.end());
    add_row(r, "cell", cv, label, "median_beta", sorted[sorted.size() / 2]);
    add_row(r, "cell", cv, label, "max_beta", sorted.back());
    for (int k = 0; k <= 30; ++k) {
      const double x = 1.0 + 0.1 * k;
      const auto count = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
      add_row(r, "beta", x, label, "cdf", static_cast<double>(count) / draws);
    }
  }
  return r;
}

std::vector<std::pair<BandSpec, BandSpec>> oracle_band_configurations(int bins) {
  std::vector<std::pair<BandSpec, BandSpec>> out;
  for (int a = 1; a <= bins; ++a) {
    for (int b = a + 1; b <= bins; ++b) {
      for (int c = 1; c <= bins; ++c) {
        for (int d = c + 1; d <= bins; ++d) {
          if (c == a || c == b || d == a || d == b) continue;
          out.emplace_back(BandSpec{a, b}, BandSpec{c, d});
        }
      }
    }
  }
  return out;
}

ExperimentReport exp_oracle_comparison(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentReport r = make_report(cfg);
  auto configs = oracle_band_configurations(cfg.oracle_bins);
  if (static_cast<std::size_t>(cfg.repetitions) < configs.size()) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(configs.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.repetitions); ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
    }
    order.resize(static_cast<std::size_t>(cfg.repetitions));
    std::sort(order.begin(), order.end());
    std::vector<std::pair<BandSpec, BandSpec>> chosen;
    for (std::size_t i : order) chosen.push_back(configs[i]);
    configs = std::move(chosen);
  }
  std::vector<std::int64_t> grid;
  for (double l : cfg.sweep) grid.push_back(static_cast<std::int64_t>(l));
  const std::int64_t l_max = *std::max_element(grid.begin(), grid.end());

  const auto jobs = run_jobs<OracleJob>(configs.size(), [&](std::size_t j) {
    DesignProblem p = cfg.problem;
    p.message = configs[j].first;
    p.interferer = configs[j].second;
    p.trials = l_max;
    p.seed = cfg.seed;
    OracleJob job;
    std::optional<OracleResult> oracle;
    try {
      oracle = exhaustive_search(p);
    } catch (const NoFeasibleError&) {
      job.skipped = true;
      return job;
    }
    const SdpSolution sol = solve_relaxation(p, cfg.solver);
    const std::vector<Candidate> cands = sample_candidates(p, sol, l_max);
    for (std::int64_t l : grid) {
      const std::span<const Candidate> prefix(cands.data(), static_cast<std::size_t>(l));
      std::array<double, 4> v{};
      int slot = 0;
      for (ScoreKind kind : {ScoreKind::MessagePower, ScoreKind::RejectionRatio,
                             ScoreKind::ReciprocalDynamicRange}) {
        const auto best = select_best(prefix, kind);
        const double opt = score_of(oracle->best_for(kind).metrics, kind);
        v[static_cast<std::size_t>(slot++)] = best ? metric_ratio(score_of(best->metrics, kind), opt) : 0.0;
      }
      const auto best = select_best(prefix, ScoreKind::MessagePower);
      const double opt = oracle->best_by_power.metrics.message_power;
      v[3] = best && std::abs(best->metrics.message_power - opt) <= 1e-9 * std::max(1.0, opt) ? 1.0 : 0.0;
      job.values.push_back(v);
    }
    return job;
  });

  std::int64_t skipped = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!jobs[j].second.empty()) {
      add_failure(r, "configuration", static_cast<double>(j), "alg1", jobs[j].second);
    } else if (jobs[j].first.skipped) {
      ++skipped;
    }
  }
  static constexpr std::array<const char*, 4> kNames = {"power_ratio", "rho_ratio", "chi_ratio",
                                                        "power_exact_match_rate"};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double l = static_cast<double>(grid[g]);
    for (std::size_t s = 0; s < kNames.size(); ++s) {
      std::vector<double> xs;
      for (const auto& job : jobs) {
        if (job.second.empty() && !job.first.skipped) xs.push_back(job.first.values[g][s]);
      }
      const MeanSe m = mean_se(xs);
      add_row(r, "trials", l, "alg1", kNames[s], m.mean, m.se);
    }
    add_row(r, "trials", l, "alg1", "configurations",
            static_cast<double>(jobs.size()) - static_cast<double>(skipped) - static_cast<double>(r.failures));
    add_row(r, "trials", l, "alg1", "skipped_infeasible", static_cast<double>(skipped));
  }
  return r;
}

ExperimentReport exp_baseline_comparison(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentReport r = make_report(cfg);
  const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);
  const std::size_t points = cfg.sweep.size();

  const auto jobs = run_jobs<BaselineJob>(points * reps, [&](std::size_t j) {
    const int width = static_cast<int>(cfg.sweep[j / reps]);
    const std::uint64_t rep = j % reps;
    const std::uint64_t job_seed = cfg.seed ^ ((static_cast<std::uint64_t>(width) << 32) | rep);
    auto rng = trial_stream(job_seed, 0);
    DesignProblem p = cfg.problem;
    std::tie(p.message, p.interferer) = random_bands(p.n, cfg.message_width, width, rng);
    p.seed = job_seed;

    BaselineJob job;
    using clock = std::chrono::steady_clock;
    auto timed = [&](std::size_t m, auto&& fn) {
      const auto t0 = clock::now();
      try {
        job.rho[m] = capped(fn());
      } catch (const std::exception& e) {
        job.error[m] = e.what();
      }
      job.seconds[m] = std::chrono::duration<double>(clock::now() - t0).count();
    };

    std::optional<SdpSolution> sol;
    timed(0, [&] {
      sol = solve_relaxation(p, cfg.solver);
      const DesignResult d = run_design(p, *sol, ScoreKind::RejectionRatio);
      if (!d.best) throw NoFeasibleError("no feasible candidate");
      return d.best->metrics.rejection_ratio;
    });
    ShapeOptions shape = cfg.shape;
    shape.seed = job_seed;
    LpnnOptions lpnn = cfg.lpnn;
    lpnn.seed = job_seed;
    const auto shape_run = [&](std::size_t m, Variant v) {
      const BaselineResult b = run_shape(p, v, shape);
      job.monotone[m] = non_increasing(b.objective_trace);
      return b.metrics.rejection_ratio;
    };
    timed(1, [&] { return shape_run(1, Variant::Unimodular); });
    timed(2, [&] { return shape_run(2, Variant::Binary); });
    timed(3, [&] { return run_lpnn(p, Variant::Unimodular, lpnn).metrics.rejection_ratio; });
    timed(4, [&] { return run_lpnn(p, Variant::Binary, lpnn).metrics.rejection_ratio; });
    timed(5, [&] {
      if (!sol) throw NoFeasibleError("relaxation unavailable");
      return quantized_principal_eigenvector(p, *sol).metrics.rejection_ratio;
    });
    return job;
  });

  for (std::size_t pt = 0; pt < points; ++pt) {
    const double width = cfg.sweep[pt];
    for (std::size_t m = 0; m < kBaselineMethods.size(); ++m) {
      const std::string method(kBaselineMethods[m]);
      std::vector<double> rho, seconds;
      std::int64_t failed = 0, monotone = 0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto& job = jobs[pt * reps + rep];
        if (!job.second.empty()) {
          ++failed;
          continue;
        }
        if (!job.first.error[m].empty()) {
          ++failed;
          continue;
        }
        rho.push_back(job.first.rho[m]);
        if (job.first.monotone[m]) ++monotone;
        seconds.push_back(job.first.seconds[m]);
      }
      const MeanSe mr = mean_se(rho);
      add_row(r, "width", width, method, "mean_rho", mr.mean, mr.se);
      const MeanSe ms = mean_se(seconds);
      add_row(r, "width", width, method, "mean_seconds", cfg.timing ? ms.mean : kNaN,
              cfg.timing ? ms.se : kNaN);
      add_row(r, "width", width, method, "runs", static_cast<double>(rho.size()));
      add_row(r, "width", width, method, "failed_runs", static_cast<double>(failed));
      if (m == 1 || m == 2) {
        add_row(r, "width", width, method, "monotone_trace_rate",
                rho.empty() ? kNaN : static_cast<double>(monotone) / static_cast<double>(rho.size()));
      }
      r.failures += failed;
    }
  }
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::FeasibilityVsAlpha: return exp_feasibility_vs_alpha(cfg);
    case ExperimentKind::FeasibilityVsWidth: return exp_feasibility_vs_width(cfg);
    case ExperimentKind::RatioHistogram: return exp_ratio_histogram(cfg);
    case ExperimentKind::BetaDistribution: return exp_beta_distribution(cfg);
    case ExperimentKind::OracleComparison: return exp_oracle_comparison(cfg);
    case ExperimentKind::BaselineComparison: return exp_baseline_comparison(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

std::vector<ReportRow> select_rows(const ExperimentReport& report, std::string_view method,
                                   std::string_view statistic) {
  std::vector<ReportRow> out;
  for (const ReportRow& row : report.rows) {
    if (row.method == method && row.statistic == statistic) out.push_back(row);
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(const ExperimentReport& report, std::ostream& out) {
  std::string header;
  for (const auto& [key, value] : report.metadata) header += csv_field(key) + ",";
  header += "sweep,sweep_value,method,statistic,value,std_error";
  out << header << "\r\n";
  std::string prefix;
  for (const auto& [key, value] : report.metadata) prefix += csv_field(value) + ",";
  for (const ReportRow& row : report.rows) {
    out << prefix << csv_field(row.sweep) << ',' << format_number(row.sweep_value) << ','
        << csv_field(row.method) << ',' << csv_field(row.statistic) << ','
        << format_number(row.value) << ',' << format_number(row.std_error) << "\r\n";
  }
}

std::filesystem::path write_csv_file(const ExperimentReport& report, const ExperimentConfig& cfg,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (std::string(to_string(cfg.kind)) + "_" + std::to_string(cfg.seed) + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_csv(report, out);
  if (!out) throw ConfigError("failed writing " + path.string());
  return path;
}

}  // namespace binseq
