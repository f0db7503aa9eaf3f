#pragma once

// Fixed random reservoir and the leaky echo-state update
//
//   x(t+1) = (1 - a) x(t) + a tanh(W_r x(t) + W_in u(t) + b)
//
// Weights are drawn once from a seeded stream and never trained.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "besn/error.hpp"
#include "besn/random.hpp"
#include "besn/spectral.hpp"

namespace besn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ReservoirConfig {
  std::size_t n_units = 100;
  double spectral_radius = 0.9;
  double input_scaling = 0.5;
  double leak_rate = 0.3;
  double density = 0.1;
  double bias_scale = 0.0;
  // Std-like half-width of the uniform state perturbation; applied during training only.
  double noise_level = 0.0;
  std::uint64_t seed = 42;
  std::size_t washout_frames = 0;

  void validate() const {
    if (n_units < 1) throw ConfigError("n_units", "must be >= 1");
    if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius))
      throw ConfigError("spectral_radius", "must be a finite value > 0");
    if (!(input_scaling >= 0.0) || !std::isfinite(input_scaling))
      throw ConfigError("input_scaling", "must be a finite value >= 0");
    if (!(leak_rate >= 0.0 && leak_rate <= 1.0))
      throw ConfigError("leak_rate", "must lie in [0, 1]");
    if (!(density > 0.0 && density <= 1.0))
      throw ConfigError("density", "must lie in (0, 1]");
    if (!(bias_scale >= 0.0) || !std::isfinite(bias_scale))
      throw ConfigError("bias_scale", "must be a finite value >= 0");
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
      throw ConfigError("noise_level", "must be a finite value >= 0");
  }
};

/// Immutable after construction; safe to share between threads.
struct ReservoirWeights {
  SparseRowMatrix w_r;
  RowMatrix w_in;  // n_units x input_dim
  Eigen::VectorXd b;
  std::size_t input_dim = 0;
  double achieved_spectral_radius = 0.0;

  std::size_t n_units() const { return static_cast<std::size_t>(w_r.rows()); }
};

/// States after each consumed frame: row t holds x(t+1), starting from x(0).
struct StateSequence {
  RowMatrix states;  // T x n_units

  std::size_t length() const { return static_cast<std::size_t>(states.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(states.cols()); }
};

/// Draw order: W_r sparsity pattern (row-major), W_r values, W_in (row-major), b.
inline ReservoirWeights init_weights(const ReservoirConfig& config, std::size_t input_dim) {
  config.validate();
  if (input_dim < 1) throw ConfigError("input_dim", "must be >= 1");

  const auto n = static_cast<Eigen::Index>(config.n_units);
  const auto d = static_cast<Eigen::Index>(input_dim);
  Rng rng(config.seed);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> positions;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rng.uniform01() < config.density) positions.emplace_back(i, j);
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(positions.size());
  for (auto [i, j] : positions) triplets.emplace_back(i, j, rng.symmetric(1.0));

  ReservoirWeights weights;
  weights.input_dim = input_dim;
  weights.w_r.resize(n, n);
  weights.w_r.setFromTriplets(triplets.begin(), triplets.end());
  weights.w_r.makeCompressed();

  const double raw_radius = estimate_spectral_radius(weights.w_r);
  if (!(raw_radius > 0.0)) {
    throw ConfigError("density",
                      "raw reservoir matrix has zero spectral radius; cannot rescale to "
                      "spectral_radius (increase density or n_units)");
  }
  weights.w_r *= config.spectral_radius / raw_radius;
  weights.achieved_spectral_radius = estimate_spectral_radius(weights.w_r);

  weights.w_in.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) weights.w_in(i, j) = rng.symmetric(config.input_scaling);
  }
  weights.b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) weights.b(i) = rng.symmetric(config.bias_scale);
  return weights;
}

namespace detail {

// state <- (1-a) state + a tanh(W_r state + drive) [+ noise]; drive already holds W_in u + b.
template <typename DriveVec>
void leaky_update(const ReservoirWeights& w, Eigen::VectorXd& state, const DriveVec& drive,
                  double leak_rate, double noise, Rng* noise_rng) {
  Eigen::VectorXd pre = w.w_r * state;
  pre += drive;
  state = (1.0 - leak_rate) * state + leak_rate * pre.array().tanh().matrix();
  if (noise > 0.0 && noise_rng != nullptr) {
    for (Eigen::Index i = 0; i < state.size(); ++i) state(i) += noise_rng->symmetric(noise);
  }
}

}  // namespace detail

/// One leaky echo-state update. Noise is drawn from `noise_rng` when noise > 0.
template <typename StateVec, typename InputVec>
Eigen::VectorXd step(const ReservoirWeights& weights, const Eigen::MatrixBase<StateVec>& state,
                     const Eigen::MatrixBase<InputVec>& input, double leak_rate,
                     double noise = 0.0, Rng* noise_rng = nullptr) {
  if (static_cast<std::size_t>(state.size()) != weights.n_units())
    throw DimensionError("step: state length", weights.n_units(), static_cast<std::size_t>(state.size()));
  if (static_cast<std::size_t>(input.size()) != weights.input_dim)
    throw DimensionError("step: input length", weights.input_dim, static_cast<std::size_t>(input.size()));
  Eigen::VectorXd next = state.template cast<double>();
  const Eigen::VectorXd drive = weights.w_in * input.template cast<double>() + weights.b;
  detail::leaky_update(weights, next, drive, leak_rate, noise, noise_rng);
  return next;
}

/// Run the reservoir over `sequence` (T x D, one frame per row) from `initial_state`.
template <typename SeqDerived>
StateSequence run_forward_from(const ReservoirWeights& weights,
                               const Eigen::MatrixBase<SeqDerived>& sequence,
                               const ReservoirConfig& config, const Eigen::VectorXd& initial_state,
                               Rng* noise_rng = nullptr) {
  const auto T = sequence.rows();
  if (T == 0) throw DataError("run_forward: empty sequence");
  if (static_cast<std::size_t>(sequence.cols()) != weights.input_dim)
    throw DimensionError("run_forward: frame width", weights.input_dim,
                         static_cast<std::size_t>(sequence.cols()));
  if (static_cast<std::size_t>(initial_state.size()) != weights.n_units())
    throw DimensionError("run_forward: initial state length", weights.n_units(),
                         static_cast<std::size_t>(initial_state.size()));

  // Input drive for every frame at once: column t is W_in u(t) + b.
  Eigen::MatrixXd drive = weights.w_in * sequence.transpose().template cast<double>();
  drive.colwise() += weights.b;

  StateSequence out;
  out.states.resize(T, static_cast<Eigen::Index>(weights.n_units()));
  Eigen::VectorXd state = initial_state;
  for (Eigen::Index t = 0; t < T; ++t) {
    detail::leaky_update(weights, state, drive.col(t), config.leak_rate, config.noise_level,
                         noise_rng);
    out.states.row(t) = state.transpose();
  }
  return out;
}

template <typename SeqDerived>
StateSequence run_forward(const ReservoirWeights& weights, const Eigen::MatrixBase<SeqDerived>& sequence,
                          const ReservoirConfig& config, Rng* noise_rng = nullptr) {
  return run_forward_from(weights, sequence, config,
                          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(weights.n_units())),
                          noise_rng);
}

}  // namespace besn
