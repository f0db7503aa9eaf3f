#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "besn/random.hpp"
#include "besn/spectral.hpp"

namespace besn {
namespace {

double dense_oracle(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

TEST(SpectralRadius, Diagonal) {
  Eigen::MatrixXd m = Eigen::Vector2d(0.5, -0.8).asDiagonal();
  EXPECT_NEAR(estimate_spectral_radius(m), 0.8, 1e-12);
}

TEST(SpectralRadius, ZeroMatrix) {
  EXPECT_EQ(estimate_spectral_radius(Eigen::MatrixXd::Zero(3, 3)), 0.0);
}

TEST(SpectralRadius, RotationHasComplexPair) {
  // Eigenvalues 0.7 * exp(+-i theta): plain power iteration would oscillate.
  const double t = 0.9;
  Eigen::MatrixXd m(3, 3);
  m << 0.7 * std::cos(t), -0.7 * std::sin(t), 0, 0.7 * std::sin(t), 0.7 * std::cos(t), 0, 0, 0, 0.2;
  EXPECT_NEAR(estimate_spectral_radius(m), 0.7, 1e-10);
}

TEST(SpectralRadius, RandomDenseMatchesEigendecomposition) {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd m(50, 50);
    for (Eigen::Index i = 0; i < 50; ++i)
      for (Eigen::Index j = 0; j < 50; ++j) m(i, j) = rng.symmetric(1.0);
    const double expected = dense_oracle(m);
    EXPECT_NEAR(estimate_spectral_radius(m), expected, 1e-4 * expected) << "trial " << trial;
  }
}

TEST(SpectralRadius, SparseMatchesDense) {
  Rng rng(5);
  Eigen::SparseMatrix<double, Eigen::RowMajor> s(80, 80);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < 80; ++i)
    for (int j = 0; j < 80; ++j)
      if (rng.uniform01() < 0.1) trips.emplace_back(i, j, rng.symmetric(1.0));
  s.setFromTriplets(trips.begin(), trips.end());
  const double expected = dense_oracle(Eigen::MatrixXd(s));
  EXPECT_NEAR(estimate_spectral_radius(s), expected, 1e-4 * expected);
}

TEST(SpectralRadius, RejectsNonSquare) {
  EXPECT_THROW(estimate_spectral_radius(Eigen::MatrixXd::Ones(2, 3)), DimensionError);
}

TEST(SpectralRadius, RejectsNonFinite) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(estimate_spectral_radius(m), NumericalError);
}

}  // namespace
}  // namespace besn
