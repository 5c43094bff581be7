#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "binseq/problem.hpp"
#include "binseq/sdp.hpp"
#include "binseq/spectral.hpp"

namespace binseq {

struct Candidate {
  BinarySequence sequence;
  MetricBundle metrics;
  std::int64_t trial_index = -1;  // -1 for deterministic (non-sampled) candidates
  std::optional<double> gamma;    // f(s) / objective(S), when objective > 0
};

struct DesignResult {
  std::optional<Candidate> best;
  std::int64_t n_feasible = 0;
  std::int64_t n_trials = 0;
  double feasibility_rate = 0.0;
  double gamma_min_feasible = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  ScoreKind score_kind = ScoreKind::MessagePower;
};

/// splitmix64 finalizer; spreads small master seeds over all 64 bits.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for trial `trial_index` of a run seeded with `seed`: the mixed
/// master seed XOR the trial index. Mixing first keeps runs with nearby
/// seeds from drawing the same set of streams.
inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial_index) {
  return std::mt19937_64(mix_seed(seed) ^ trial_index);
}

/// sign(factor * v) with v standard normal drawn from `rng` (one draw per
/// factor column). Zero entries of the projection map to +1.
BinarySequence sample_candidate(const Eigen::Ref<const Eigen::MatrixXd>& factor,
                                std::mt19937_64& rng);

/// Trial `trial_index` of a design run; identical to what run_design samples.
BinarySequence sample_trial(const SdpSolution& sol, std::uint64_t seed, std::int64_t trial_index);

/// True when candidate a beats b under `kind`: higher score, ties to the
/// lower trial index.
bool better_candidate(const Candidate& a, const Candidate& b, ScoreKind kind);

/// Algorithm steps 4-9: p.trials randomized projections of the relaxation
/// factor, quantized, filtered by g(s) <= alpha (full alpha) and ranked by
/// `score`. Trials run in parallel; the result does not depend on the thread
/// count.
DesignResult run_design(const DesignProblem& p, const SdpSolution& sol, ScoreKind score);

/// Single-threaded reference for run_design.
DesignResult run_design_serial(const DesignProblem& p, const SdpSolution& sol, ScoreKind score);

/// Every trial of a run, in trial order (full retention).
std::vector<Candidate> sample_candidates(const DesignProblem& p, const SdpSolution& sol,
                                         std::int64_t trials);

/// Best candidate among trials [0, prefix) of an already sampled list.
std::optional<Candidate> select_best(std::span<const Candidate> candidates, ScoreKind kind);

/// sign(sqrt(lambda_1) u_1). Throws RankZeroError when the matrix is zero.
Candidate quantized_principal_eigenvector(const DesignProblem& p, const SdpSolution& sol);

/// tr(A_I arcsin(S)) / tr(A_I S), arcsin element-wise after clamping to
/// [-1, 1]; +inf when the denominator is <= 1e-12.
double beta_ratio(const Eigen::MatrixXd& s, const GramMatrix& interferer);
double beta_ratio(const SdpSolution& sol, const GramMatrix& interferer);

/// exp(-alpha^2 / (8 n pi^2 K^2)), K = |interferer band|.
double mcdiarmid_bound(const DesignProblem& p);

/// f(candidate) / objective(S). Throws DegenerateObjectiveError when the
/// relaxation objective is <= 1e-12.
double gamma(const Candidate& candidate, const SdpSolution& sol);

}  // namespace binseq
