#pragma once

// Bidirectional reservoir: the same (or an independently seeded) reservoir is
// run over the sequence and over its time reversal. The backward trajectory is
// re-reversed so that row t of both trajectories refers to input frame t.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "besn/error.hpp"
#include "besn/reservoir.hpp"

namespace besn {

enum class AggregationMode { Final, Mean, MeanPlusFinal };

inline std::string_view to_string(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::Final: return "final";
    case AggregationMode::Mean: return "mean";
    case AggregationMode::MeanPlusFinal: return "mean_plus_final";
  }
  return "final";
}

inline AggregationMode parse_aggregation(std::string_view text) {
  if (text == "final") return AggregationMode::Final;
  if (text == "mean") return AggregationMode::Mean;
  if (text == "mean_plus_final") return AggregationMode::MeanPlusFinal;
  throw ConfigError("agg", "expected final|mean|mean_plus_final, got '" + std::string(text) + "'");
}

/// Feature width produced per direction.
inline std::size_t aggregate_width(AggregationMode mode, std::size_t n_units) {
  return mode == AggregationMode::MeanPlusFinal ? 2 * n_units : n_units;
}

struct BiStates {
  StateSequence forward;
  StateSequence backward;  // already re-reversed: row t aligns with frame t
  std::size_t n_units_each = 0;
};

template <typename SeqDerived>
RowMatrix reverse_sequence(const Eigen::MatrixBase<SeqDerived>& sequence) {
  if (sequence.rows() == 0) throw DataError("reverse_sequence: empty sequence");
  return sequence.template cast<double>().colwise().reverse();
}

/// `backward_weights` may alias `forward_weights` (shared reservoir, the default).
template <typename SeqDerived>
BiStates run_bidirectional(const ReservoirWeights& forward_weights,
                           const ReservoirWeights& backward_weights,
                           const Eigen::MatrixBase<SeqDerived>& sequence,
                           const ReservoirConfig& config, Rng* forward_noise = nullptr,
                           Rng* backward_noise = nullptr) {
  if (forward_weights.n_units() != backward_weights.n_units())
    throw DimensionError("run_bidirectional: backward reservoir size", forward_weights.n_units(),
                         backward_weights.n_units());
  BiStates bi;
  bi.n_units_each = forward_weights.n_units();
  bi.forward = run_forward(forward_weights, sequence, config, forward_noise);
  StateSequence raw = run_forward(backward_weights, reverse_sequence(sequence), config, backward_noise);
  bi.backward.states = raw.states.colwise().reverse();
  return bi;
}

template <typename SeqDerived>
BiStates run_bidirectional(const ReservoirWeights& shared_weights,
                           const Eigen::MatrixBase<SeqDerived>& sequence,
                           const ReservoirConfig& config) {
  return run_bidirectional(shared_weights, shared_weights, sequence, config);
}

namespace detail {

// Reduce one trajectory given in processing order (row 0 consumed first).
template <typename Block>
Eigen::VectorXd reduce_trajectory(const Block& processed, AggregationMode mode, std::size_t washout) {
  const Eigen::Index T = processed.rows();
  const Eigen::Index n = processed.cols();
  const Eigen::Index skip = std::min<Eigen::Index>(static_cast<Eigen::Index>(washout), T - 1);
  Eigen::VectorXd final_state = processed.row(T - 1).transpose();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  if (mode != AggregationMode::Final) {
    for (Eigen::Index t = skip; t < T; ++t) mean += processed.row(t).transpose();
    mean /= static_cast<double>(T - skip);
  }
  switch (mode) {
    case AggregationMode::Final: return final_state;
    case AggregationMode::Mean: return mean;
    case AggregationMode::MeanPlusFinal: {
      Eigen::VectorXd both(2 * n);
      both << mean, final_state;
      return both;
    }
  }
  return final_state;
}

}  // namespace detail

/// Unidirectional reduction of one trajectory.
inline Eigen::VectorXd aggregate(const StateSequence& states, AggregationMode mode,
                                 std::size_t washout = 0) {
  if (states.length() == 0) throw DataError("aggregate: empty trajectory");
  return detail::reduce_trajectory(states.states, mode, washout);
}

/// Forward block then backward block. Each direction's "final" is the state it
/// reached after consuming its whole input (for the backward pass: aligned row 0).
inline Eigen::VectorXd aggregate(const BiStates& bi, AggregationMode mode, std::size_t washout = 0) {
  if (bi.forward.length() == 0 || bi.backward.length() != bi.forward.length())
    throw DataError("aggregate: forward/backward trajectories must be non-empty and equal length");
  const Eigen::VectorXd f = detail::reduce_trajectory(bi.forward.states, mode, washout);
  const RowMatrix backward_processed = bi.backward.states.colwise().reverse();
  const Eigen::VectorXd b = detail::reduce_trajectory(backward_processed, mode, washout);
  Eigen::VectorXd out(f.size() + b.size());
  out << f, b;
  return out;
}

}  // namespace besn
