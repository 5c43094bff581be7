#include "binseq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "binseq/errors.hpp"

namespace binseq {

namespace {

// exp(-j 2 pi k i / n) / sqrt(n) with the exponent reduced mod n first.
std::complex<double> dft_entry(int n, long k, long i) {
  const long r = (k * i) % n;
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / n;
  return std::polar(1.0 / std::sqrt(static_cast<double>(n)), angle);
}

EigenFactorization finish(Eigen::VectorXd values, Eigen::MatrixXd vectors) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });

  EigenFactorization out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = values[order[k]];
    out.eigenvectors.col(k) = vectors.col(order[k]);
  }
  if (n == 0) return out;

  const double top = out.eigenvalues[0];
  const double clamp_tol = 1e-8 * std::max(top, 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    double& v = out.eigenvalues[k];
    if (v < 0.0 && v > -clamp_tol) v = 0.0;
  }
  if (top > 0.0) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (out.eigenvalues[k] > kRankTol * top) ++out.rank;
    }
  }
  return out;
}

}  // namespace

PartialDftBasis build_partial_dft(int n, const BandSpec& band) {
  if (n <= 0) throw IndexError("basis length must be positive");
  if (!band.empty() && band.indices().back() >= n) {
    throw IndexError("bin " + std::to_string(band.indices().back()) + " out of range");
  }
  PartialDftBasis basis{n, band, Eigen::MatrixXcd(n, static_cast<Eigen::Index>(band.size()))};
  for (std::size_t k = 0; k < band.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      basis.columns(i, static_cast<Eigen::Index>(k)) = dft_entry(n, band.indices()[k], i);
    }
  }
  return basis;
}

Eigen::MatrixXcd dft_matrix(int n) {
  Eigen::MatrixXcd f(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) f(i, k) = dft_entry(n, k, i);
  return f;
}

GramMatrix gram(const PartialDftBasis& basis) {
  if (basis.columns.cols() == 0) return GramMatrix{Eigen::MatrixXd::Zero(basis.n, basis.n)};
  Eigen::MatrixXd g = (basis.columns * basis.columns.adjoint()).real();
  // Exact symmetry; the product is Hermitian only up to rounding.
  g = 0.5 * (g + g.transpose()).eval();
  return GramMatrix{std::move(g)};
}

GramMatrix gram(int n, const BandSpec& band) { return gram(build_partial_dft(n, band)); }

EigenFactorization eigh(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double tol = 1e-12 * a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > kJacobiSweepLimit) {
      throw NonConvergenceError("Jacobi eigensolver exceeded its sweep limit");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the (p, q) rotation.
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return finish(a.diagonal(), std::move(v));
}

EigenFactorization eigh_fast(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NonConvergenceError("symmetric eigensolver did not converge");
  }
  return finish(solver.eigenvalues(), solver.eigenvectors());
}

Eigen::VectorXd full_spectrum(std::span<const double> s) {
  const int n = static_cast<int>(s.size());
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::conj(dft_entry(n, k, i)) * s[i];
    out[k] = std::abs(acc);
  }
  return out;
}

Eigen::VectorXd full_spectrum(const BinarySequence& s) {
  const Eigen::VectorXd v = s.as_vector();
  return full_spectrum(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace binseq
