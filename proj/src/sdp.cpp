#include "binseq/sdp.hpp"

#include <algorithm>
#include <cmath>

#include "binseq/errors.hpp"

namespace binseq {

namespace {

// Residual balancing runs every kAdaptInterval iterations; adapting more
// often makes the penalty oscillate on degenerate (rank-one) optima.
constexpr int kAdaptInterval = 50;

// Projection onto the PSD cone.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw NonConvergenceError("PSD projection failed");
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  Eigen::Index first = 0;
  while (first < values.size() && values[first] <= 0.0) ++first;
  const Eigen::Index count = values.size() - first;
  if (count == 0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const Eigen::MatrixXd v = eig.eigenvectors().rightCols(count);
  const Eigen::VectorXd w = values.tail(count);
  return v * w.asDiagonal() * v.transpose();
}

// D^{-1/2} Z D^{-1/2}; keeps PSD and makes the diagonal exactly one.
Eigen::MatrixXd unit_diagonal(const Eigen::MatrixXd& z) {
  const Eigen::Index n = z.rows();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_sqrt[i] = z(i, i) > 1e-12 ? 1.0 / std::sqrt(z(i, i)) : 0.0;
  }
  Eigen::MatrixXd s = inv_sqrt.asDiagonal() * z * inv_sqrt.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z(i, i) <= 1e-12) {
      s.row(i).setZero();
      s.col(i).setZero();
    }
    s(i, i) = 1.0;
  }
  return 0.5 * (s + s.transpose());
}

double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace

MaxCutResult inner_maxcut_sdp(const Eigen::MatrixXd& c_in, const SolverConfig& cfg,
                              const AdmmState* warm) {
  const Eigen::Index n = c_in.rows();
  const Eigen::MatrixXd c = 0.5 * (c_in + c_in.transpose());
  const double scale = c.norm();

  MaxCutResult out;
  if (scale == 0.0) {
    out.matrix = Eigen::MatrixXd::Identity(n, n);
    out.state = AdmmState{out.matrix, Eigen::MatrixXd::Zero(n, n), cfg.penalty};
    return out;
  }
  const Eigen::MatrixXd cn = c / scale;

  AdmmState st;
  if (warm != nullptr && warm->z.rows() == n) {
    st = *warm;
  } else {
    st = AdmmState{Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, n), cfg.penalty};
  }

  Eigen::MatrixXd s(n, n);
  bool converged = false;
  int it = 0;
  while (it < cfg.max_outer_iters) {
    ++it;
    s = st.z - st.u + cn / st.penalty;
    s.diagonal().setOnes();

    Eigen::MatrixXd z_prev = std::move(st.z);
    const Eigen::MatrixXd shifted = s + st.u;
    st.z = project_psd(shifted);
    st.u = shifted - st.z;

    const double r_primal = (s - st.z).norm() / std::max(1.0, st.z.norm());
    const double r_dual =
        st.penalty * (st.z - z_prev).norm() / std::max(1.0, st.penalty * st.u.norm());
    if (r_primal <= cfg.primal_tol && r_dual <= cfg.dual_tol) {
      converged = true;
      break;
    }
    if (it % kAdaptInterval == 0) {
      if (r_primal > 10.0 * r_dual) {
        st.penalty *= 2.0;
        st.u /= 2.0;
      } else if (r_dual > 10.0 * r_primal) {
        st.penalty /= 2.0;
        st.u *= 2.0;
      }
    }
  }
  if (!converged) {
    throw NonConvergenceError("ADMM did not reach tolerance in " +
                              std::to_string(cfg.max_outer_iters) + " iterations");
  }
  out.matrix = unit_diagonal(st.z);
  out.objective = trace_product(c, out.matrix);
  out.iterations = it;
  out.state = std::move(st);
  return out;
}

MaxCutResult solve_at_lambda(const GramMatrix& message, const GramMatrix& interferer,
                             double lambda, const SolverConfig& cfg, const AdmmState* warm) {
  return inner_maxcut_sdp(message.values - lambda * interferer.values, cfg, warm);
}

void finalize_solution(SdpSolution& sol, const DesignProblem& p) {
  const GramMatrix message = gram(p.n, p.message);
  const GramMatrix interferer = gram(p.n, p.interferer);
  sol.objective = trace_product(message.values, sol.matrix);
  sol.interferer_trace = trace_product(interferer.values, sol.matrix);

  const EigenFactorization eig = eigh_fast(sol.matrix);
  sol.eigenvalues = eig.eigenvalues;
  sol.rank = eig.rank;
  sol.factor = Eigen::MatrixXd::Zero(p.n, p.n);
  for (int k = 0; k < eig.rank; ++k) {
    sol.factor.col(k) = std::sqrt(std::max(eig.eigenvalues[k], 0.0)) * eig.eigenvectors.col(k);
  }
  sol.kkt_residual = kkt_residuals(sol, p);
}

BisectionResult dual_bisection(const DesignProblem& p, const SolverConfig& cfg) {
  validate_problem(p);
  const GramMatrix message = gram(p.n, p.message);
  const GramMatrix interferer = gram(p.n, p.interferer);
  const double target = 0.5 * p.alpha;

  SdpSolution sol;
  auto trace_of = [&](const MaxCutResult& r) { return trace_product(interferer.values, r.matrix); };

  MaxCutResult lo_res = solve_at_lambda(message, interferer, 0.0, cfg);
  sol.inner_solves = 1;
  sol.admm_iterations = lo_res.iterations;
  double lo_trace = trace_of(lo_res);
  if (p.interferer.empty() || lo_trace <= target + cfg.primal_tol) {
    sol.matrix = lo_res.matrix;
    finalize_solution(sol, p);
    return {0.0, std::move(sol)};
  }

  const double free_objective = trace_product(message.values, lo_res.matrix);
  auto reaches_free_optimum = [&](const MaxCutResult& r) {
    return trace_product(message.values, r.matrix) >=
           free_objective - 10.0 * cfg.primal_tol * std::max(1.0, std::abs(free_objective));
  };

  double lo = 0.0;
  double hi = 1.0;
  std::optional<MaxCutResult> hi_res;
  double hi_trace = 0.0;
  AdmmState warm = lo_res.state;
  for (int d = 0; d < cfg.max_bisection; ++d) {
    MaxCutResult r = solve_at_lambda(message, interferer, hi, cfg, &warm);
    ++sol.inner_solves;
    sol.admm_iterations += r.iterations;
    warm = r.state;
    const double t = trace_of(r);
    if (t <= target + cfg.primal_tol && reaches_free_optimum(r)) {
      // Feasible and as good as the unconstrained optimum: lambda = 0 is a
      // valid multiplier for this matrix.
      sol.matrix = r.matrix;
      finalize_solution(sol, p);
      return {0.0, std::move(sol)};
    }
    if (t <= target + cfg.primal_tol) {
      hi_res = std::move(r);
      hi_trace = t;
      break;
    }
    lo = hi;
    lo_res = std::move(r);
    lo_trace = t;
    hi *= 2.0;
  }
  if (!hi_res) {
    throw InfeasibleRelaxationError(
        "interferer bound alpha/2 = " + std::to_string(target) +
        " is below the smallest trace reachable by a unit-diagonal PSD matrix");
  }

  for (int it = 0; it < cfg.max_bisection; ++it) {
    if (hi - lo <= 1e-7 * std::max(1.0, hi)) break;
    if (std::abs(hi_trace - target) <= 1e-3 * cfg.bisection_tol * std::max(1.0, p.alpha)) break;
    const double mid = 0.5 * (lo + hi);
    MaxCutResult r = solve_at_lambda(message, interferer, mid, cfg, &warm);
    ++sol.inner_solves;
    sol.admm_iterations += r.iterations;
    warm = r.state;
    const double t = trace_of(r);
    if (t > target + cfg.primal_tol) {
      lo = mid;
      lo_res = std::move(r);
      lo_trace = t;
    } else {
      hi = mid;
      hi_res = std::move(r);
      hi_trace = t;
    }
  }

  // Mix the bracketing solutions so the trace lands on the bound.
  double theta = 0.0;
  if (hi_trace < target && lo_trace > hi_trace) {
    theta = std::clamp((target - hi_trace) / (lo_trace - hi_trace), 0.0, 1.0);
  }
  sol.matrix = theta * lo_res.matrix + (1.0 - theta) * hi_res->matrix;
  sol.dual_multiplier = theta * lo + (1.0 - theta) * hi;
  finalize_solution(sol, p);
  return {sol.dual_multiplier, std::move(sol)};
}

SdpSolution solve_relaxation(const DesignProblem& p, const SolverConfig& cfg) {
  return dual_bisection(p, cfg).solution;
}

double kkt_residuals(const SdpSolution& sol, const DesignProblem& p) {
  const Eigen::MatrixXd& s = sol.matrix;
  const Eigen::Index n = s.rows();
  const GramMatrix message = gram(p.n, p.message);
  const GramMatrix interferer = gram(p.n, p.interferer);
  const double lambda = sol.dual_multiplier;
  const Eigen::MatrixXd c = message.values - lambda * interferer.values;
  const double c_scale = std::max(1.0, c.norm());

  double residual = std::max(0.0, -lambda);
  for (Eigen::Index i = 0; i < n; ++i) residual = std::max(residual, std::abs(s(i, i) - 1.0));

  const double itrace = trace_product(interferer.values, s);
  residual = std::max(residual, itrace - 0.5 * p.alpha);
  residual = std::max(residual, std::abs(lambda * (itrace - 0.5 * p.alpha)));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> primal(0.5 * (s + s.transpose()),
                                                        Eigen::EigenvaluesOnly);
  if (n > 0) residual = std::max(residual, -primal.eigenvalues()[0]);

  // Diagonal dual by least squares on (Diag(nu) - C) S = 0, row by row.
  const Eigen::MatrixXd cs = c * s;
  Eigen::VectorXd nu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double denom = s.row(i).squaredNorm();
    nu[i] = denom > 0.0 ? cs.row(i).dot(s.row(i)) / denom : c(i, i);
  }
  const Eigen::MatrixXd w = Eigen::MatrixXd(nu.asDiagonal()) - c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dual(w, Eigen::EigenvaluesOnly);
  double negative = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = dual.eigenvalues()[k];
    if (v < 0.0) negative += v * v;
  }
  residual = std::max(residual, std::sqrt(negative) / c_scale);
  residual = std::max(residual, std::abs(trace_product(w, s)) / c_scale);
  return residual;
}

}  // namespace binseq
