#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "besn/error.hpp"

namespace besn {

/// Frames are stored at the file precision (32-bit) so read/write is lossless.
using FrameMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Two hands x 21 landmarks x (x, y, z).
inline constexpr std::size_t kHandLandmarks = 21;
inline constexpr std::size_t kHandBlockWidth = kHandLandmarks * 3;
inline constexpr std::size_t kTwoHandFeatureDim = 2 * kHandBlockWidth;

inline constexpr float kMissing = std::numeric_limits<float>::quiet_NaN();

struct KeypointSequence {
  FrameMatrix frames;  // T x D; NaN marks a missing value before cleaning
  std::string label;
  std::string sample_id;
  std::optional<double> fps_hint;

  std::size_t length() const { return static_cast<std::size_t>(frames.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(frames.cols()); }
};

class ShortSequenceError : public DataError {
 public:
  explicit ShortSequenceError(const std::string& what) : DataError(what) {}
};

/// Per feature: interior gaps are linearly interpolated, leading/trailing gaps take
/// the nearest observed value, and never-observed features become 0.
inline FrameMatrix clean_frames(const FrameMatrix& raw) {
  const Eigen::Index T = raw.rows();
  if (T < 2) throw ShortSequenceError("sequence has " + std::to_string(T) + " frame(s); at least 2 required");
  FrameMatrix out = raw;
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    Eigen::Index last = -1;  // last observed frame
    for (Eigen::Index t = 0; t < T; ++t) {
      if (!std::isfinite(raw(t, j))) continue;
      if (last < 0) {
        for (Eigen::Index k = 0; k < t; ++k) out(k, j) = raw(t, j);
      } else if (t - last > 1) {
        const double a = raw(last, j);
        const double b = raw(t, j);
        for (Eigen::Index k = last + 1; k < t; ++k) {
          const double w = static_cast<double>(k - last) / static_cast<double>(t - last);
          out(k, j) = static_cast<float>(a + (b - a) * w);
        }
      }
      last = t;
    }
    if (last < 0) {
      out.col(j).setZero();
    } else {
      for (Eigen::Index k = last + 1; k < T; ++k) out(k, j) = raw(last, j);
    }
  }
  return out;
}

inline KeypointSequence clean_sequence(KeypointSequence raw) {
  raw.frames = clean_frames(raw.frames);
  return raw;
}

/// Subtracts each hand's wrist landmark (landmark 0) from that hand's landmarks, per frame.
/// Requires D to be a multiple of the 63-wide hand block.
inline void center_wrists(KeypointSequence& seq) {
  const auto d = seq.feature_dim();
  if (d == 0 || d % kHandBlockWidth != 0)
    throw DataError("center_wrists: feature_dim " + std::to_string(d) + " is not a multiple of " +
                    std::to_string(kHandBlockWidth));
  for (Eigen::Index t = 0; t < seq.frames.rows(); ++t) {
    for (std::size_t hand = 0; hand < d / kHandBlockWidth; ++hand) {
      const auto base = static_cast<Eigen::Index>(hand * kHandBlockWidth);
      const float wx = seq.frames(t, base), wy = seq.frames(t, base + 1), wz = seq.frames(t, base + 2);
      for (std::size_t l = 0; l < kHandLandmarks; ++l) {
        const auto col = base + static_cast<Eigen::Index>(3 * l);
        seq.frames(t, col) -= wx;
        seq.frames(t, col + 1) -= wy;
        seq.frames(t, col + 2) -= wz;
      }
    }
  }
}

}  // namespace besn
