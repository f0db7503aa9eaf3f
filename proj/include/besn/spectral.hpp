#pragma once

// Spectral radius estimation for square (dense or sparse) matrices.
//
// Random reservoir matrices usually have a complex-conjugate dominant pair, for
// which single-vector power iteration oscillates instead of converging. We run
// power iteration on a small block of vectors and take Rayleigh-Ritz values of
// the projected matrix, which captures real and complex dominant eigenvalues.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "besn/error.hpp"
#include "besn/random.hpp"

namespace besn {

struct PowerIterationOptions {
  std::size_t max_iterations = 1000;
  double relative_tolerance = 1e-6;
  std::size_t block_size = 8;
  // Number of consecutive iterations that must satisfy the tolerance.
  std::size_t stable_iterations = 3;
  std::uint64_t seed = 0x5eed5eedULL;
};

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Scalar, int Options, typename Index>
bool all_finite(const Eigen::SparseMatrix<Scalar, Options, Index>& m) {
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (typename Eigen::SparseMatrix<Scalar, Options, Index>::InnerIterator it(m, k); it; ++it) {
      if (!std::isfinite(it.value())) return false;
    }
  }
  return true;
}

inline double max_abs_eigenvalue(const Eigen::MatrixXd& small) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(small, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Rayleigh-Ritz eigenvalue solve failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Largest absolute eigenvalue of a square matrix; 0 for the zero matrix.
template <typename MatrixType>
double estimate_spectral_radius(const MatrixType& matrix, const PowerIterationOptions& opts = {}) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionError("spectral radius requires a square matrix (columns)",
                         static_cast<std::size_t>(matrix.rows()),
                         static_cast<std::size_t>(matrix.cols()));
  }
  if (!detail::all_finite(matrix)) {
    throw NumericalError("spectral radius: matrix has non-finite entries");
  }
  const Eigen::Index n = matrix.rows();
  if (n == 0) return 0.0;

  const Eigen::Index k = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(opts.block_size));
  Rng rng(opts.seed);
  Eigen::MatrixXd block(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) block(i, j) = rng.symmetric(1.0);
  }
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(block).householderQ() *
                      Eigen::MatrixXd::Identity(n, k);

  double previous = -1.0;
  std::size_t stable = 0;
  double estimate = 0.0;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::MatrixXd z = matrix * q;
    const double scale = z.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;

    // Ritz values of the projection onto the current subspace.
    const Eigen::MatrixXd projected = q.transpose() * z;
    estimate = detail::max_abs_eigenvalue(projected);

    if (previous >= 0.0 &&
        std::abs(estimate - previous) <= opts.relative_tolerance * std::max(estimate, 1e-300)) {
      if (++stable >= opts.stable_iterations) break;
    } else {
      stable = 0;
    }
    previous = estimate;

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z / scale);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  }
  return estimate;
}

}  // namespace besn
