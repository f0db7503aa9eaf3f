#pragma once

// BESN model files (all integers little-endian, all reals f64 little-endian):
//
//   "BESN"            magic
//   u16               format version (1)
//   u32 n_units       total state width (bi: split evenly per direction)
//   f64 x6            spectral_radius, input_scaling, leak_rate, density, bias_scale, noise_level
//   u32               washout_frames
//   u8 direction      0 = uni, 1 = bi
//   u8 aggregation    0 = final, 1 = mean, 2 = mean_plus_final
//   u8                shared_weights
//   f64               lambda
//   u32 C, then C x (u32 byte length + UTF-8 bytes)     class labels
//   u32 F, F x f64 feature_mean, F x f64 feature_std
//   u32 rows, u32 cols, rows*cols f64 (row-major)        w_out
//   u64 reservoir seed, u32 input_dim, u32 units per direction
//
// Reservoir weights are not stored: they are re-drawn from the seed.

#include <cstdint>
#include <filesystem>
#include <string>

#include "besn/error.hpp"
#include "besn/kps_io.hpp"
#include "besn/pipeline.hpp"
#include "besn/readout.hpp"

namespace besn {

inline constexpr std::uint16_t kModelFormatVersion = 1;

struct SavedModel {
  PipelineConfig config;
  ReadoutModel readout;
  std::size_t input_dim = 0;
};

inline std::string encode_model(const SavedModel& m) {
  std::string out = "BESN";
  le::put_u16(out, kModelFormatVersion);
  const auto& r = m.config.reservoir;
  le::put_u32(out, static_cast<std::uint32_t>(r.n_units));
  for (double v : {r.spectral_radius, r.input_scaling, r.leak_rate, r.density, r.bias_scale, r.noise_level})
    le::put_f64(out, v);
  le::put_u32(out, static_cast<std::uint32_t>(r.washout_frames));
  out.push_back(static_cast<char>(m.config.direction == Direction::Bi ? 1 : 0));
  out.push_back(static_cast<char>(m.config.aggregation));
  out.push_back(static_cast<char>(m.config.shared_weights ? 1 : 0));
  le::put_f64(out, m.readout.lambda);

  le::put_u32(out, static_cast<std::uint32_t>(m.readout.classes.size()));
  for (const auto& c : m.readout.classes) {
    le::put_u32(out, static_cast<std::uint32_t>(c.size()));
    out += c;
  }
  le::put_u32(out, static_cast<std::uint32_t>(m.readout.feature_mean.size()));
  for (Eigen::Index i = 0; i < m.readout.feature_mean.size(); ++i) le::put_f64(out, m.readout.feature_mean(i));
  for (Eigen::Index i = 0; i < m.readout.feature_std.size(); ++i) le::put_f64(out, m.readout.feature_std(i));
  le::put_u32(out, static_cast<std::uint32_t>(m.readout.w_out.rows()));
  le::put_u32(out, static_cast<std::uint32_t>(m.readout.w_out.cols()));
  for (Eigen::Index i = 0; i < m.readout.w_out.rows(); ++i)
    for (Eigen::Index j = 0; j < m.readout.w_out.cols(); ++j) le::put_f64(out, m.readout.w_out(i, j));
  le::put_u64(out, r.seed);
  le::put_u32(out, static_cast<std::uint32_t>(m.input_dim));
  le::put_u32(out, static_cast<std::uint32_t>(m.config.units_per_direction()));
  return out;
}

inline SavedModel decode_model(const std::string& bytes, const std::string& context = "model") {
  le::Reader r(bytes, context);
  if (bytes.size() < 4 || bytes.compare(0, 4, "BESN") != 0)
    throw FormatError(FormatErrorKind::BadMagic, context + ": bad magic (not a BESN model file)");
  r.bytes(4);
  const std::uint16_t version = r.u16();
  if (version != kModelFormatVersion)
    throw FormatError(FormatErrorKind::VersionMismatch,
                      context + ": unsupported model version " + std::to_string(version));
  SavedModel m;
  auto& rc = m.config.reservoir;
  rc.n_units = r.u32();
  rc.spectral_radius = r.f64();
  rc.input_scaling = r.f64();
  rc.leak_rate = r.f64();
  rc.density = r.f64();
  rc.bias_scale = r.f64();
  rc.noise_level = r.f64();
  rc.washout_frames = r.u32();
  const std::uint8_t direction = r.u8();
  const std::uint8_t aggregation = r.u8();
  if (direction > 1 || aggregation > 2) throw DataError(context + ": invalid direction/aggregation tag");
  m.config.direction = direction ? Direction::Bi : Direction::Uni;
  m.config.aggregation = static_cast<AggregationMode>(aggregation);
  m.config.shared_weights = r.u8() != 0;
  m.readout.lambda = r.f64();
  m.config.lambda = m.readout.lambda;

  const std::uint32_t n_classes = r.u32();
  for (std::uint32_t i = 0; i < n_classes; ++i) m.readout.classes.push_back(r.bytes(r.u32()));
  const std::uint32_t F = r.u32();
  r.need(static_cast<std::size_t>(F) * 16);
  m.readout.feature_mean.resize(F);
  m.readout.feature_std.resize(F);
  for (std::uint32_t i = 0; i < F; ++i) m.readout.feature_mean(i) = r.f64();
  for (std::uint32_t i = 0; i < F; ++i) m.readout.feature_std(i) = r.f64();
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  if (rows != n_classes || cols != F + 1)
    throw DataError(context + ": w_out shape does not match classes/features");
  r.need(static_cast<std::size_t>(rows) * cols * 8);
  m.readout.w_out.resize(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) m.readout.w_out(i, j) = r.f64();
  rc.seed = r.u64();
  m.input_dim = r.u32();
  const std::uint32_t per_direction = r.u32();
  if (per_direction != m.config.units_per_direction())
    throw DataError(context + ": units per direction inconsistent with n_units/direction");
  return m;
}

inline void save_model(const std::filesystem::path& path, const SavedModel& m) {
  write_file_bytes(path, encode_model(m));
}

inline SavedModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("model file '" + path.string() + "' does not exist");
  return decode_model(read_file_bytes(path), path.string());
}

}  // namespace besn
