#include "binseq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "binseq/errors.hpp"
#include "binseq/spectral.hpp"

namespace binseq {

std::string_view to_string(Variant v) {
  return v == Variant::Unimodular ? "unimodular" : "binary";
}

Variant parse_variant(std::string_view text) {
  if (text == "unimodular") return Variant::Unimodular;
  if (text == "binary") return Variant::Binary;
  throw ConfigError("unknown variant '" + std::string(text) + "'");
}

ShapeBounds shape_bounds_from_problem(const DesignProblem& p) {
  ShapeBounds b{std::vector<double>(p.n, kUnboundedMagnitude), std::vector<double>(p.n, 0.0)};
  if (!p.interferer.empty()) {
    const double cap = std::sqrt(p.alpha / static_cast<double>(p.interferer.size()));
    for (int k : p.interferer.indices()) b.upper[k] = cap;
  }
  for (int k : p.message.indices()) b.lower[k] = 1.0;
  return b;
}

// ---------------------------------------------------------------- SHAPE

double shape_objective(const ShapeState& state, const Eigen::MatrixXcd& dft) {
  return (dft.adjoint() * state.sequence - state.scale * state.spectrum).squaredNorm();
}

Eigen::VectorXcd shape_spectrum_step(const ShapeState& state, const ShapeBounds& bounds,
                                     const Eigen::MatrixXcd& dft) {
  if (state.scale == std::complex<double>(0.0, 0.0)) throw ZeroScaleError("SHAPE scale is zero");
  const Eigen::VectorXcd z = (dft.adjoint() * state.sequence) / state.scale;
  Eigen::VectorXcd x = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z[i]);
    const double hi = bounds.upper[static_cast<std::size_t>(i)];
    const double lo = bounds.lower[static_cast<std::size_t>(i)];
    // A zero bin has no phase; take phase 0 when it must be lifted to lo.
    const std::complex<double> phase = mag > 0.0 ? z[i] / mag : std::complex<double>(1.0, 0.0);
    if (mag > hi) {
      x[i] = hi * phase;
    } else if (mag < lo) {
      x[i] = lo * phase;
    }
  }
  return x;
}

std::complex<double> shape_scale_step(const ShapeState& state, const Eigen::MatrixXcd& dft) {
  const double energy = state.spectrum.squaredNorm();
  if (!(energy > 0.0)) throw ZeroSpectrumError("SHAPE spectrum is zero");
  return state.spectrum.dot(dft.adjoint() * state.sequence) / energy;
}

Eigen::VectorXcd shape_sequence_step(const ShapeState& state, Variant variant,
                                     const Eigen::MatrixXcd& dft) {
  // F unitary: ||F^H s - a x|| = ||s - F (a x)||, minimized entry by entry.
  const Eigen::VectorXcd v = dft * (state.scale * state.spectrum);
  Eigen::VectorXcd s(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (variant == Variant::Binary) {
      s[i] = v[i].real() < 0.0 ? -1.0 : 1.0;
    } else {
      const double mag = std::abs(v[i]);
      s[i] = mag > 0.0 ? v[i] / mag : std::complex<double>(1.0, 0.0);
    }
  }
  return s;
}

namespace {

Eigen::VectorXcd random_start(int n, Variant variant, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXcd s(n);
  if (variant == Variant::Binary) {
    std::bernoulli_distribution coin;
    for (int i = 0; i < n; ++i) s[i] = coin(rng) ? 1.0 : -1.0;
  } else {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < n; ++i) s[i] = std::polar(1.0, phase(rng));
  }
  return s;
}

MetricBundle baseline_metrics(const DesignProblem& p, const Eigen::VectorXcd& s) {
  return BandEvaluator(p).evaluate(s);
}

}  // namespace

BaselineResult run_shape(const DesignProblem& p, Variant variant, const ShapeOptions& opts) {
  validate_problem(p);
  const Eigen::MatrixXcd dft = dft_matrix(p.n);
  const ShapeBounds bounds = shape_bounds_from_problem(p);

  ShapeState st;
  st.sequence = random_start(p.n, variant, opts.seed);
  st.spectrum = dft.adjoint() * st.sequence;

  BaselineResult out;
  double previous = kInfinity;
  int it = 0;
  while (it < opts.max_iters) {
    ++it;
    st.spectrum = shape_spectrum_step(st, bounds, dft);
    out.objective_trace.push_back(shape_objective(st, dft));
    st.scale = shape_scale_step(st, dft);
    out.objective_trace.push_back(shape_objective(st, dft));
    st.sequence = shape_sequence_step(st, variant, dft);
    st.objective = shape_objective(st, dft);
    out.objective_trace.push_back(st.objective);

    const double change = std::abs(previous - st.objective);
    if (std::isfinite(previous) && change <= opts.tol * std::max(1.0, std::abs(previous))) break;
    previous = st.objective;
  }
  out.iterations = it;
  out.sequence = st.sequence;
  out.metrics = baseline_metrics(p, st.sequence);
  return out;
}

// ----------------------------------------------------------------- LPNN

namespace {

// Complex sequence view of the neurons.
Eigen::VectorXcd neurons_to_sequence(const Eigen::VectorXd& t, Variant variant) {
  if (variant == Variant::Binary) return t.cast<std::complex<double>>();
  const Eigen::Index n = t.size() / 2;
  Eigen::VectorXcd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = {t[i], t[n + i]};
  return s;
}

// |s_i|^2 per entry.
Eigen::VectorXd entry_powers(const Eigen::VectorXd& t, Variant variant) {
  if (variant == Variant::Binary) return t.cwiseAbs2();
  const Eigen::Index n = t.size() / 2;
  return t.head(n).cwiseAbs2() + t.tail(n).cwiseAbs2();
}

}  // namespace

double lpnn_lagrangian(const LpnnState& st, const LpnnParams& prm, const Eigen::MatrixXcd& dft) {
  const Eigen::VectorXcd y = dft.adjoint() * neurons_to_sequence(st.neurons, prm.variant);
  const Eigen::VectorXd fit = y.cwiseAbs2() - st.scale * prm.target;
  const Eigen::VectorXd cons = entry_powers(st.neurons, prm.variant).array() - 1.0;
  return prm.weights.dot(fit.cwiseAbs2()) + prm.c0 * cons.squaredNorm() + st.multipliers.dot(cons);
}

LpnnIncrements lpnn_increments(const LpnnState& st, const LpnnParams& prm,
                               const Eigen::MatrixXcd& dft) {
  const Eigen::Index n = dft.rows();
  const Eigen::VectorXcd y = dft.adjoint() * neurons_to_sequence(st.neurons, prm.variant);
  const Eigen::VectorXd fit = y.cwiseAbs2() - st.scale * prm.target;
  const Eigen::VectorXd cons = entry_powers(st.neurons, prm.variant).array() - 1.0;

  // d|y_i|^2 / d(Re s_j) = 2 Re(F_ji y_i), d/d(Im s_j) = 2 Im(F_ji y_i).
  const Eigen::VectorXcd g =
      dft * (prm.weights.cwiseProduct(fit).cast<std::complex<double>>().cwiseProduct(y));
  const Eigen::VectorXd per_entry = 4.0 * prm.c0 * cons + 2.0 * st.multipliers;

  LpnnIncrements inc;
  if (prm.variant == Variant::Binary) {
    inc.neurons = -(4.0 * g.real() + per_entry.cwiseProduct(st.neurons));
  } else {
    inc.neurons.resize(2 * n);
    inc.neurons.head(n) = -(4.0 * g.real() + per_entry.cwiseProduct(st.neurons.head(n)));
    inc.neurons.tail(n) = -(4.0 * g.imag() + per_entry.cwiseProduct(st.neurons.tail(n)));
  }
  inc.scale = 2.0 * prm.weights.cwiseProduct(fit).dot(prm.target);
  inc.multipliers = cons;
  return inc;
}

Eigen::VectorXd lpnn_target_spectrum(const DesignProblem& p) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(p.n);
  if (!p.interferer.empty()) {
    const double level = 0.5 * std::sqrt(p.alpha / static_cast<double>(p.interferer.size()));
    for (int k : p.interferer.indices()) x[k] = level;
  }
  return x;
}

double lpnn_constraint_residual(const LpnnState& st, Variant variant) {
  return (entry_powers(st.neurons, variant).array() - 1.0).abs().maxCoeff();
}

BaselineResult run_lpnn(const DesignProblem& p, Variant variant, const LpnnOptions& opts) {
  validate_problem(p);
  const Eigen::MatrixXcd dft = dft_matrix(p.n);

  LpnnParams prm;
  prm.variant = variant;
  prm.target = lpnn_target_spectrum(p);
  prm.c0 = opts.c0;
  if (opts.weights.empty()) {
    prm.weights = Eigen::VectorXd::Ones(p.n);
  } else {
    if (static_cast<int>(opts.weights.size()) != p.n) {
      throw LengthMismatchError("LPNN weights must have length n");
    }
    prm.weights = Eigen::Map<const Eigen::VectorXd>(opts.weights.data(), p.n);
  }

  const Eigen::Index dim = variant == Variant::Binary ? p.n : 2 * p.n;
  LpnnState st;
  st.neurons.resize(dim);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (Eigen::Index i = 0; i < dim; ++i) st.neurons[i] = unif(rng);
  st.scale = 1.0;
  st.multipliers = Eigen::VectorXd::Zero(p.n);

  BaselineResult out;
  int it = 0;
  while (it < opts.max_iters) {
    ++it;
    const LpnnIncrements inc = lpnn_increments(st, prm, dft);
    st.neurons += opts.step * inc.neurons;
    st.scale += opts.step * inc.scale;
    st.multipliers += opts.step * inc.multipliers;
    out.objective_trace.push_back(lpnn_constraint_residual(st, variant));

    const double largest = st.neurons.cwiseAbs().maxCoeff();
    if (!(largest <= 1e6) || !std::isfinite(st.scale)) {
      throw DivergenceError("LPNN neurons diverged; reduce the step size");
    }
    const double move = std::max({inc.neurons.cwiseAbs().maxCoeff(), std::abs(inc.scale),
                                  inc.multipliers.cwiseAbs().maxCoeff()});
    if (move < 1e-8) break;
  }
  out.iterations = it;

  Eigen::VectorXcd s = neurons_to_sequence(st.neurons, variant);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (variant == Variant::Binary) {
      s[i] = s[i].real() < 0.0 ? -1.0 : 1.0;
    } else {
      const double mag = std::abs(s[i]);
      s[i] = mag > 0.0 ? s[i] / mag : std::complex<double>(1.0, 0.0);
    }
  }
  out.sequence = s;
  out.metrics = baseline_metrics(p, s);
  return out;
}

}  // namespace binseq
