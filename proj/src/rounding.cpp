#include "binseq/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <omp.h>

#include "binseq/errors.hpp"

namespace binseq {

namespace {

constexpr double kObjectiveFloor = 1e-12;

struct Accumulator {
  std::optional<Candidate> best;
  std::int64_t n_feasible = 0;
  double gamma_min = kInfinity;

  void add(Candidate c, ScoreKind kind) {
    if (!c.metrics.feasible) return;
    ++n_feasible;
    if (c.gamma) gamma_min = std::min(gamma_min, *c.gamma);
    if (!best || better_candidate(c, *best, kind)) best = std::move(c);
  }

  void merge(Accumulator other, ScoreKind kind) {
    n_feasible += other.n_feasible;
    gamma_min = std::min(gamma_min, other.gamma_min);
    if (other.best && (!best || better_candidate(*other.best, *best, kind))) {
      best = std::move(other.best);
    }
  }
};

Candidate make_candidate(const BandEvaluator& eval, const SdpSolution& sol, BinarySequence s,
                         std::int64_t index) {
  Candidate c;
  c.metrics = eval.evaluate(s);
  c.sequence = std::move(s);
  c.trial_index = index;
  if (sol.objective > kObjectiveFloor) c.gamma = c.metrics.message_power / sol.objective;
  return c;
}

DesignResult finish(const DesignProblem& p, const SdpSolution& sol, ScoreKind score,
                    Accumulator acc) {
  DesignResult r;
  r.score_kind = score;
  r.n_trials = p.trials;
  r.n_feasible = acc.n_feasible;
  r.feasibility_rate = static_cast<double>(acc.n_feasible) / static_cast<double>(p.trials);
  if (acc.n_feasible > 0 && std::isfinite(acc.gamma_min)) r.gamma_min_feasible = acc.gamma_min;
  r.best = std::move(acc.best);
  r.beta = beta_ratio(sol, gram(p.n, p.interferer));
  return r;
}

}  // namespace

BinarySequence sample_candidate(const Eigen::Ref<const Eigen::MatrixXd>& factor,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(factor.cols());
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
  const Eigen::VectorXd w = factor * v;
  return BinarySequence::sign_of(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
}

BinarySequence sample_trial(const SdpSolution& sol, std::uint64_t seed, std::int64_t trial_index) {
  auto rng = trial_stream(seed, static_cast<std::uint64_t>(trial_index));
  return sample_candidate(sol.factor.leftCols(sol.rank), rng);
}

bool better_candidate(const Candidate& a, const Candidate& b, ScoreKind kind) {
  const double sa = score_of(a.metrics, kind);
  const double sb = score_of(b.metrics, kind);
  if (sa != sb) return sa > sb;
  return a.trial_index < b.trial_index;
}

DesignResult run_design(const DesignProblem& p, const SdpSolution& sol, ScoreKind score) {
  validate_problem(p);
  const BandEvaluator eval(p);
  Accumulator total;

#pragma omp parallel
  {
    Accumulator local;
#pragma omp for schedule(static) nowait
    for (std::int64_t t = 0; t < p.trials; ++t) {
      local.add(make_candidate(eval, sol, sample_trial(sol, p.seed, t), t), score);
    }
#pragma omp critical(binseq_run_design_merge)
    total.merge(std::move(local), score);
  }
  return finish(p, sol, score, std::move(total));
}

DesignResult run_design_serial(const DesignProblem& p, const SdpSolution& sol, ScoreKind score) {
  validate_problem(p);
  const BandEvaluator eval(p);
  Accumulator acc;
  for (std::int64_t t = 0; t < p.trials; ++t) {
    acc.add(make_candidate(eval, sol, sample_trial(sol, p.seed, t), t), score);
  }
  return finish(p, sol, score, std::move(acc));
}

std::vector<Candidate> sample_candidates(const DesignProblem& p, const SdpSolution& sol,
                                         std::int64_t trials) {
  const BandEvaluator eval(p);
  std::vector<Candidate> out(static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < trials; ++t) {
    out[static_cast<std::size_t>(t)] = make_candidate(eval, sol, sample_trial(sol, p.seed, t), t);
  }
  return out;
}

std::optional<Candidate> select_best(std::span<const Candidate> candidates, ScoreKind kind) {
  const Candidate* best = nullptr;
  for (const Candidate& c : candidates) {
    if (!c.metrics.feasible) continue;
    if (best == nullptr || better_candidate(c, *best, kind)) best = &c;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

Candidate quantized_principal_eigenvector(const DesignProblem& p, const SdpSolution& sol) {
  if (sol.rank < 1 || sol.eigenvalues.size() == 0 || !(sol.eigenvalues[0] > 0.0)) {
    throw RankZeroError("relaxation matrix has no positive eigenvalue");
  }
  const Eigen::VectorXd w = sol.factor.col(0);  // sqrt(lambda_1) u_1
  return make_candidate(
      BandEvaluator(p), sol,
      BinarySequence::sign_of(std::span<const double>(w.data(), static_cast<std::size_t>(w.size()))),
      -1);
}

double beta_ratio(const Eigen::MatrixXd& s, const GramMatrix& interferer) {
  const double denom = interferer.values.cwiseProduct(s).sum();
  if (denom <= 1e-12) return kInfinity;
  const Eigen::MatrixXd arcsin =
      s.unaryExpr([](double x) { return std::asin(std::clamp(x, -1.0, 1.0)); });
  return interferer.values.cwiseProduct(arcsin).sum() / denom;
}

double beta_ratio(const SdpSolution& sol, const GramMatrix& interferer) {
  return beta_ratio(sol.matrix, interferer);
}

double mcdiarmid_bound(const DesignProblem& p) {
  if (p.interferer.empty()) throw EmptyInterfererError("bound needs a nonempty interferer band");
  const double k = static_cast<double>(p.interferer.size());
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return std::exp(-(p.alpha * p.alpha) / (8.0 * p.n * pi2 * k * k));
}

double gamma(const Candidate& candidate, const SdpSolution& sol) {
  if (!(sol.objective > kObjectiveFloor)) {
    throw DegenerateObjectiveError("relaxation objective is zero");
  }
  return candidate.metrics.message_power / sol.objective;
}

}  // namespace binseq
