#pragma once

#include <cstdint>

#include "binseq/problem.hpp"

namespace binseq {

inline constexpr int kOracleLimit = 24;

struct OracleBest {
  BinarySequence sequence;
  MetricBundle metrics;
};

struct OracleResult {
  OracleBest best_by_power;
  OracleBest best_by_rho;
  OracleBest best_by_chi;
  std::int64_t n_feasible = 0;
  std::int64_t n_enumerated = 0;  // 2^(n-1)

  const OracleBest& best_for(ScoreKind kind) const;
};

/// Every binary sequence with s_0 = +1, in Gray-code order with incremental
/// band-spectrum updates; high-order prefixes run in parallel. Scores within
/// 1e-9 (relative) count as ties and go to the lexicographically smaller
/// sequence (-1 < +1). Throws SizeLimitError when n > n_limit and
/// NoFeasibleError when no sequence satisfies g(s) <= alpha.
OracleResult exhaustive_search(const DesignProblem& p, int n_limit = kOracleLimit);

/// Direct evaluation of every sequence through BandEvaluator; same contract.
OracleResult exhaustive_search_serial(const DesignProblem& p, int n_limit = kOracleLimit);

/// max f(s) over binary s with g(s) <= alpha / 2; -inf when that set is empty.
double halved_constraint_optimum(const DesignProblem& p, int n_limit = kOracleLimit);

}  // namespace binseq
