#pragma once

// Independent reference computations and hand-rolled generators for the tests.
// Nothing here calls into the library's spectral code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "binseq/problem.hpp"

namespace testing {

// X_k = n^{-1/2} sum_i s_i exp(+j 2 pi k i / n), i.e. (F^H s)_k.
inline std::complex<double> naive_bin(const std::vector<double>& s, int k) {
  const int n = static_cast<int>(s.size());
  std::complex<double> acc{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(k) * i) % n) / n;
    acc += s[i] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc / std::sqrt(static_cast<double>(n));
}

inline std::vector<double> to_doubles(const binseq::BinarySequence& s) {
  std::vector<double> out;
  for (auto e : s.entries()) out.push_back(e);
  return out;
}

inline double naive_band_power(const std::vector<double>& s, const binseq::BandSpec& band) {
  double acc = 0.0;
  for (int k : band.indices()) acc += std::norm(naive_bin(s, k));
  return acc;
}

struct NaiveMetrics {
  double f = 0.0, g = 0.0, rho = 0.0, chi = 0.0;
  bool feasible = false;
};

// Direct evaluation with the null conventions written out by hand.
inline NaiveMetrics naive_metrics(const binseq::DesignProblem& p, const std::vector<double>& s) {
  NaiveMetrics m;
  double min_m = std::numeric_limits<double>::infinity(), max_m = 0.0, max_i = 0.0;
  for (int k : p.message.indices()) {
    const double a = std::abs(naive_bin(s, k));
    m.f += a * a;
    min_m = std::min(min_m, a);
    max_m = std::max(max_m, a);
  }
  for (int k : p.interferer.indices()) {
    const double a = std::abs(naive_bin(s, k));
    m.g += a * a;
    max_i = std::max(max_i, a);
  }
  constexpr double zero = 1e-9;
  const double inf = std::numeric_limits<double>::infinity();
  if (p.interferer.empty() || max_i <= zero) {
    m.rho = min_m <= zero && !p.interferer.empty() ? 0.0 : inf;
  } else {
    m.rho = min_m / max_i;
  }
  m.chi = max_m <= zero ? 0.0 : min_m / max_m;
  m.feasible = m.g <= p.alpha + 1e-9;
  return m;
}

struct BruteBest {
  double power = -std::numeric_limits<double>::infinity();
  double rho = -std::numeric_limits<double>::infinity();
  double chi = -std::numeric_limits<double>::infinity();
  std::int64_t feasible = 0;
};

// All 2^n sequences (no symmetry reduction), naive DFT per sequence.
inline BruteBest brute_force(const binseq::DesignProblem& p, double limit) {
  BruteBest b;
  const std::uint64_t count = std::uint64_t{1} << p.n;
  std::vector<double> s(static_cast<std::size_t>(p.n));
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int i = 0; i < p.n; ++i) s[i] = ((mask >> i) & 1U) ? -1.0 : 1.0;
    binseq::DesignProblem q = p;
    q.alpha = limit;
    const NaiveMetrics m = naive_metrics(q, s);
    if (!m.feasible) continue;
    ++b.feasible;
    b.power = std::max(b.power, m.f);
    b.rho = std::max(b.rho, m.rho);
    b.chi = std::max(b.chi, m.chi);
  }
  return b;
}

// Hand-rolled generators for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }

  binseq::BinarySequence sequence(int n) {
    std::vector<std::int8_t> e(static_cast<std::size_t>(n));
    for (auto& v : e) v = (rng() & 1U) ? 1 : -1;
    return binseq::BinarySequence(std::move(e));
  }

  std::vector<double> real_vector(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = normal();
    return v;
  }

  // Disjoint random message / interferer bands drawn from 0..n-1.
  binseq::DesignProblem problem(int n, int km, int ki, double alpha) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::shuffle(pool.begin(), pool.end(), rng);
    binseq::DesignProblem p;
    p.n = n;
    p.message = binseq::BandSpec(std::vector<int>(pool.begin(), pool.begin() + km));
    p.interferer = binseq::BandSpec(std::vector<int>(pool.begin() + km, pool.begin() + km + ki));
    p.alpha = alpha;
    p.trials = 256;
    p.seed = rng();
    return p;
  }

  Eigen::MatrixXd correlation(int n, int rank) {
    Eigen::MatrixXd g(n, rank);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < rank; ++k) g(i, k) = normal();
    Eigen::MatrixXd s = g * g.transpose();
    const Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * s * d.asDiagonal();
  }
};

}  // namespace testing
