#pragma once

// Synthetic prefix/suffix gesture task.
//
// Class k pairs prefix motif k / n_suffix with suffix motif k % n_suffix. A sample
// is [prefix + noise][random-walk filler][suffix + noise]. The class can only be
// read from both ends together, so a reservoir whose fading memory has lost the
// prefix by the last frame cannot separate classes sharing a suffix.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "besn/dataset.hpp"
#include "besn/error.hpp"
#include "besn/keypoints.hpp"
#include "besn/kps_io.hpp"
#include "besn/random.hpp"

namespace besn {

struct SyntheticSpec {
  std::size_t n_classes = 9;
  std::size_t n_prefix_motifs = 3;
  std::size_t samples_per_class = 60;
  std::size_t t_min = 40;
  std::size_t t_max = 60;
  std::size_t feature_dim = 8;
  std::size_t motif_length = 8;
  double noise_std = 0.05;
  double filler_step = 0.1;
  double val_fraction = 0.15;
  double test_fraction = 0.15;
  std::uint64_t seed = 7;

  std::size_t n_suffix_motifs() const { return n_prefix_motifs ? n_classes / n_prefix_motifs : 0; }

  void validate() const {
    if (n_classes < 2) throw ConfigError("n_classes", "must be >= 2");
    if (n_prefix_motifs < 1 || n_classes % n_prefix_motifs != 0)
      throw ConfigError("n_prefix_motifs", "must divide n_classes (n_classes = prefix motifs x suffix motifs)");
    if (samples_per_class < 1) throw ConfigError("samples_per_class", "must be >= 1");
    if (feature_dim < 1) throw ConfigError("feature_dim", "must be >= 1");
    if (motif_length < 1) throw ConfigError("motif_length", "must be >= 1");
    if (t_min > t_max) throw ConfigError("t_min", "must be <= t_max");
    if (2 * motif_length > t_min) throw ConfigError("motif_length", "2 * motif_length must be <= t_min");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("noise_std", "must be >= 0");
    if (!(filler_step >= 0.0) || !std::isfinite(filler_step)) throw ConfigError("filler_step", "must be >= 0");
    if (!(val_fraction >= 0.0 && test_fraction >= 0.0 && val_fraction + test_fraction < 1.0))
      throw ConfigError("val_fraction", "val_fraction + test_fraction must lie in [0, 1)");
  }
};

struct SyntheticDataset {
  Dataset data;
  std::vector<FrameMatrix> prefix_motifs;
  std::vector<FrameMatrix> suffix_motifs;
  Manifest manifest;  // paths are "samples/<sample_id>.kps"
};

inline std::string synthetic_label(std::size_t prefix, std::size_t suffix) {
  return "p" + std::to_string(prefix) + "s" + std::to_string(suffix);
}

inline SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto L = static_cast<Eigen::Index>(spec.motif_length);
  const auto D = static_cast<Eigen::Index>(spec.feature_dim);
  auto draw_motif = [&] {
    FrameMatrix m(L, D);
    for (Eigen::Index t = 0; t < L; ++t)
      for (Eigen::Index j = 0; j < D; ++j) m(t, j) = static_cast<float>(rng.symmetric(1.0));
    return m;
  };

  SyntheticDataset out;
  const std::size_t n_suffix = spec.n_suffix_motifs();
  for (std::size_t i = 0; i < spec.n_prefix_motifs; ++i) out.prefix_motifs.push_back(draw_motif());
  for (std::size_t i = 0; i < n_suffix; ++i) out.suffix_motifs.push_back(draw_motif());

  const auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * spec.samples_per_class));
  const auto n_test = static_cast<std::size_t>(std::floor(spec.test_fraction * spec.samples_per_class));
  const std::size_t n_train = spec.samples_per_class - n_val - n_test;

  out.data.feature_dim = spec.feature_dim;
  out.manifest.feature_dim = spec.feature_dim;
  for (std::size_t c = 0; c < spec.n_classes; ++c)
    out.data.classes.push_back(synthetic_label(c / n_suffix, c % n_suffix));
  out.manifest.classes = out.data.classes;

  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    const FrameMatrix& prefix = out.prefix_motifs[c / n_suffix];
    const FrameMatrix& suffix = out.suffix_motifs[c % n_suffix];
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      const auto T = static_cast<Eigen::Index>(rng.uniform_int(spec.t_min, spec.t_max));
      KeypointSequence seq;
      seq.frames.resize(T, D);
      for (Eigen::Index t = 0; t < L; ++t)
        for (Eigen::Index j = 0; j < D; ++j)
          seq.frames(t, j) = static_cast<float>(prefix(t, j) + spec.noise_std * rng.normal());
      Eigen::VectorXd walk = Eigen::VectorXd::Zero(D);
      for (Eigen::Index t = L; t < T - L; ++t) {
        for (Eigen::Index j = 0; j < D; ++j) {
          walk(j) += spec.filler_step * rng.normal();
          seq.frames(t, j) = static_cast<float>(walk(j));
        }
      }
      for (Eigen::Index t = 0; t < L; ++t)
        for (Eigen::Index j = 0; j < D; ++j)
          seq.frames(T - L + t, j) = static_cast<float>(suffix(t, j) + spec.noise_std * rng.normal());

      char id[64];
      std::snprintf(id, sizeof id, "c%02zu_%04zu", c, i);
      seq.sample_id = id;
      seq.label = out.data.classes[c];
      const Split split = i < n_train ? Split::Train : (i < n_train + n_val ? Split::Val : Split::Test);
      out.manifest.entries.push_back(
          {"samples/" + seq.sample_id + ".kps", seq.label, split, seq.sample_id, std::nullopt});
      out.data.split(split).push_back(std::move(seq));
    }
  }
  return out;
}

/// Writes the manifest and one KPS1 file per sample under `dir`.
inline void write_synthetic(const SyntheticDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "samples");
  for (Split s : {Split::Train, Split::Val, Split::Test}) {
    for (const auto& seq : ds.data.split(s)) write_sample(dir / "samples" / (seq.sample_id + ".kps"), seq);
  }
  write_manifest(dir / "manifest.json", ds.manifest);
}

}  // namespace besn
