#pragma once

#include <optional>

#include <Eigen/Dense>

#include "binseq/problem.hpp"
#include "binseq/spectral.hpp"

namespace binseq {

struct SolverConfig {
  int max_outer_iters = 5000;  // ADMM iterations per inner solve
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  double penalty = 1.0;  // initial ADMM penalty, self-adapted
  double bisection_tol = 1e-5;
  int max_bisection = 60;
};

/// Relaxation optimum: maximize tr(A_M S) s.t. diag(S) = 1, tr(A_I S) <= alpha/2, S PSD.
struct SdpSolution {
  Eigen::MatrixXd matrix;       // unit diagonal, PSD
  double objective = 0.0;       // tr(A_M S)
  double interferer_trace = 0.0;
  Eigen::MatrixXd factor;       // U Sigma^{1/2}; columns at or beyond `rank` are zero
  Eigen::VectorXd eigenvalues;  // descending
  int rank = 0;
  double kkt_residual = 0.0;
  double dual_multiplier = 0.0;  // lambda >= 0 on the trace inequality
  int inner_solves = 0;
  int admm_iterations = 0;
};

/// ADMM state carried between inner solves for warm starts.
struct AdmmState {
  Eigen::MatrixXd z;  // PSD iterate
  Eigen::MatrixXd u;  // scaled dual
  double penalty = 1.0;
};

struct MaxCutResult {
  Eigen::MatrixXd matrix;  // unit diagonal, PSD
  double objective = 0.0;  // tr(C S)
  int iterations = 0;
  AdmmState state;
};

/// max tr(C S) s.t. diag(S) = 1, S PSD. C is symmetrized. Throws
/// NonConvergenceError if the ADMM residuals do not meet tolerance within
/// cfg.max_outer_iters iterations.
MaxCutResult inner_maxcut_sdp(const Eigen::MatrixXd& c, const SolverConfig& cfg = {},
                              const AdmmState* warm = nullptr);

struct BisectionResult {
  double lambda = 0.0;
  SdpSolution solution;
};

/// Outer search on the scalar dual of the trace inequality. Returns the
/// lambda = 0 solution when it already meets tr(A_I S) <= alpha/2; otherwise
/// brackets lambda by doubling and bisects, then mixes the two bracketing
/// solutions so the trace constraint holds with equality.
/// Throws InfeasibleRelaxationError when no lambda meets the bound.
BisectionResult dual_bisection(const DesignProblem& p, const SolverConfig& cfg = {});

/// Validated problem -> certified relaxation solution with factor and residuals.
SdpSolution solve_relaxation(const DesignProblem& p, const SolverConfig& cfg = {});

/// Maximum of the primal, inequality, PSD, stationarity and complementary
/// slackness violations. The diagonal dual is recovered from the matrix.
double kkt_residuals(const SdpSolution& solution, const DesignProblem& p);

/// Fill factor, eigenvalues, rank, objective and traces from solution.matrix.
void finalize_solution(SdpSolution& solution, const DesignProblem& p);

/// tr(C(lambda) S) with C(lambda) = A_M - lambda A_I, solved for fixed lambda.
MaxCutResult solve_at_lambda(const GramMatrix& message, const GramMatrix& interferer,
                             double lambda, const SolverConfig& cfg,
                             const AdmmState* warm = nullptr);

}  // namespace binseq
