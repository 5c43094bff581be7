#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "binseq/problem.hpp"

namespace binseq {

/// Upper bound used for "unbounded" bins; never binds since |F_i^H s| <= sqrt(n).
inline constexpr double kUnboundedMagnitude = 1e6;

enum class Variant { Unimodular, Binary };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

/// Per-bin magnitude bounds over the full n-point spectrum.
struct ShapeBounds {
  std::vector<double> upper;
  std::vector<double> lower;
};

/// Interferer bins: [0, sqrt(alpha / |I|)]; message bins: [1, unbounded];
/// all other bins: [0, unbounded].
ShapeBounds shape_bounds_from_problem(const DesignProblem& p);

// ---------------------------------------------------------------- SHAPE

struct ShapeState {
  Eigen::VectorXcd sequence;  // real +/-1 entries in the binary variant
  Eigen::VectorXcd spectrum;  // x
  std::complex<double> scale{1.0, 0.0};
  double objective = 0.0;     // ||F^H s - scale * x||^2
};

/// ||F^H s - scale * x||^2 for the full DFT basis `dft`.
double shape_objective(const ShapeState& state, const Eigen::MatrixXcd& dft);

/// Spectrum block: per-bin projection of F^H s / scale onto the annulus
/// [lower_i, upper_i]. Throws ZeroScaleError when scale == 0.
Eigen::VectorXcd shape_spectrum_step(const ShapeState& state, const ShapeBounds& bounds,
                                     const Eigen::MatrixXcd& dft);

/// Least-squares complex scale x^H F^H s / ||x||^2. Throws ZeroSpectrumError when x == 0.
std::complex<double> shape_scale_step(const ShapeState& state, const Eigen::MatrixXcd& dft);

/// Sequence block under the variant's constraint set. Unimodular: unit
/// modulus phase-matched to F (scale x); binary: sign of its real part.
/// Zero arguments map to +1.
Eigen::VectorXcd shape_sequence_step(const ShapeState& state, Variant variant,
                                     const Eigen::MatrixXcd& dft);

struct ShapeOptions {
  int max_iters = 10000;
  double tol = 1e-10;  // relative objective change
  std::uint64_t seed = 0;
};

struct BaselineResult {
  Eigen::VectorXcd sequence;
  MetricBundle metrics;
  int iterations = 0;
  std::vector<double> objective_trace;  // SHAPE: objective after every block step;
                                        // LPNN: constraint residual after every step
};

BaselineResult run_shape(const DesignProblem& p, Variant variant, const ShapeOptions& opts = {});

// ----------------------------------------------------------------- LPNN

struct LpnnState {
  Eigen::VectorXd neurons;      // t (2n, unimodular) or s (n, binary)
  double scale = 1.0;           // alpha of the spectral fit
  Eigen::VectorXd multipliers;  // mu, length n
};

struct LpnnParams {
  Variant variant = Variant::Binary;
  Eigen::VectorXd target;   // x, length n
  Eigen::VectorXd weights;  // w_i, length n
  double c0 = 10.0;
};

struct LpnnIncrements {
  Eigen::VectorXd neurons;
  double scale = 0.0;
  Eigen::VectorXd multipliers;
};

/// Augmented Lagrangian of the spectral fit with per-entry modulus constraints.
double lpnn_lagrangian(const LpnnState& state, const LpnnParams& params,
                       const Eigen::MatrixXcd& dft);

/// Descent increments -dL/dt, -dL/dscale and the multiplier increments
/// |s_i|^2 - 1 (ascent on mu).
LpnnIncrements lpnn_increments(const LpnnState& state, const LpnnParams& params,
                               const Eigen::MatrixXcd& dft);

/// Target spectrum: message bins 1, interferer bins sqrt(alpha / |I|) / 2, others 1.
Eigen::VectorXd lpnn_target_spectrum(const DesignProblem& p);

struct LpnnOptions {
  int max_iters = 10000;
  double step = 1e-3;
  double c0 = 10.0;
  std::vector<double> weights;  // empty = all ones
  std::uint64_t seed = 0;
};

/// Euler integration of the LPNN dynamics. Throws DivergenceError when any
/// neuron exceeds 1e6 in magnitude.
BaselineResult run_lpnn(const DesignProblem& p, Variant variant, const LpnnOptions& opts = {});

/// Largest modulus-constraint violation max_i ||s_i|^2 - 1|.
double lpnn_constraint_residual(const LpnnState& state, Variant variant);

}  // namespace binseq
