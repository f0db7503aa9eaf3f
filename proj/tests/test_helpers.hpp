#pragma once

#include <vector>

#include <Eigen/Dense>

#include "besn/reservoir.hpp"
#include "oracles.hpp"

namespace besn::testing {

inline ReservoirWeights make_weights(const Eigen::MatrixXd& w_r, const Eigen::MatrixXd& w_in,
                                     const Eigen::VectorXd& b) {
  ReservoirWeights w;
  w.w_r = w_r.sparseView(0.0, 0.0);
  w.w_in = w_in;
  w.b = b;
  w.input_dim = static_cast<std::size_t>(w_in.cols());
  return w;
}

inline ReservoirWeights random_weights(Rng& rng, int n, int d, double scale = 1.0) {
  Eigen::MatrixXd w_r(n, n), w_in(n, d);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w_r(i, j) = rng.symmetric(scale);
    for (int j = 0; j < d; ++j) w_in(i, j) = rng.symmetric(scale);
    b(i) = rng.symmetric(0.3);
  }
  return make_weights(w_r, w_in, b);
}

inline RowMatrix random_sequence(Rng& rng, int T, int d, double scale = 1.0) {
  RowMatrix s(T, d);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < d; ++j) s(t, j) = rng.symmetric(scale);
  return s;
}

inline oracle::Mat to_rows(const Eigen::MatrixXd& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()), oracle::Vec(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

inline oracle::Vec to_vec(const Eigen::VectorXd& v) { return oracle::Vec(v.data(), v.data() + v.size()); }

/// Oracle trajectory for `weights` over `sequence` from the zero state.
inline oracle::Mat oracle_states(const ReservoirWeights& w, const Eigen::MatrixXd& sequence, double alpha) {
  return oracle::scripted_recurrence(to_rows(Eigen::MatrixXd(w.w_r)), to_rows(w.w_in), to_vec(w.b),
                                     to_rows(sequence), alpha, oracle::Vec(w.n_units(), 0.0));
}

inline double max_abs_diff(const RowMatrix& states, const oracle::Mat& expected) {
  double worst = 0.0;
  for (Eigen::Index t = 0; t < states.rows(); ++t)
    for (Eigen::Index i = 0; i < states.cols(); ++i)
      worst = std::max(worst, std::abs(states(t, i) - expected[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]));
  return worst;
}

}  // namespace besn::testing
