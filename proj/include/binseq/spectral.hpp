#pragma once

#include <span>

#include <Eigen/Dense>

#include "binseq/problem.hpp"

namespace binseq {

/// Columns (i, k) = exp(-j 2 pi band_k i / n) / sqrt(n).
struct PartialDftBasis {
  int n = 0;
  BandSpec band;
  Eigen::MatrixXcd columns;
};

/// Real symmetric Re(F F^H); x^T G x = ||F^H x||^2 for real x.
struct GramMatrix {
  Eigen::MatrixXd values;
  int n() const noexcept { return static_cast<int>(values.rows()); }
};

struct EigenFactorization {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues[k]
  int rank = 0;
};

inline constexpr double kRankTol = 1e-7;
inline constexpr int kJacobiSweepLimit = 100;

PartialDftBasis build_partial_dft(int n, const BandSpec& band);
/// Full n-point DFT basis (all bins).
Eigen::MatrixXcd dft_matrix(int n);

GramMatrix gram(const PartialDftBasis& basis);
GramMatrix gram(int n, const BandSpec& band);

/// Cyclic Jacobi eigensolver. Symmetrizes the input, sorts descending and
/// clamps tiny negative eigenvalues to zero. Throws NonConvergenceError after
/// kJacobiSweepLimit sweeps.
EigenFactorization eigh(const Eigen::MatrixXd& m);

/// Same contract as eigh() via Householder tridiagonalization + implicit QR.
/// Used in the solver's inner loops; eigh() is the reference.
EigenFactorization eigh_fast(const Eigen::MatrixXd& m);

/// |F_k^H s| for k = 0..n-1.
Eigen::VectorXd full_spectrum(std::span<const double> s);
Eigen::VectorXd full_spectrum(const BinarySequence& s);

}  // namespace binseq
