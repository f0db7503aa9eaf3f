#pragma once

// KPS1 sample files:
//   bytes 0..3   "KPS1"
//   u32 LE       T (frames)
//   u32 LE       D (features per frame)
//   T*D f32 LE   frame-major values; quiet-NaN marks a missing value
//
// The trailing digit of the magic is the format version.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "besn/error.hpp"
#include "besn/keypoints.hpp"

namespace besn {

enum class FormatErrorKind { BadMagic, Truncated, VersionMismatch };

class FormatError : public DataError {
 public:
  FormatError(FormatErrorKind kind, const std::string& what) : DataError(what), kind_(kind) {}
  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

namespace le {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

/// Bounds-checked little-endian reader over an in-memory buffer.
class Reader {
 public:
  Reader(const std::string& buffer, std::string context)
      : data_(buffer), context_(std::move(context)) {}

  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw FormatError(FormatErrorKind::Truncated,
                        context_ + ": truncated (needed " + std::to_string(n) + " more bytes at offset " +
                            std::to_string(pos_) + ", file has " + std::to_string(data_.size()) + ")");
    }
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  const std::string& data_;
  std::string context_;
  std::size_t pos_ = 0;
};

}  // namespace le

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline std::string encode_kps(const FrameMatrix& frames) {
  std::string out = "KPS1";
  le::put_u32(out, static_cast<std::uint32_t>(frames.rows()));
  le::put_u32(out, static_cast<std::uint32_t>(frames.cols()));
  out.reserve(out.size() + 4 * static_cast<std::size_t>(frames.size()));
  for (Eigen::Index t = 0; t < frames.rows(); ++t)
    for (Eigen::Index j = 0; j < frames.cols(); ++j) le::put_f32(out, frames(t, j));
  return out;
}

inline FrameMatrix decode_kps(const std::string& bytes, const std::string& context = "KPS1") {
  le::Reader r(bytes, context);
  if (bytes.size() < 4) throw FormatError(FormatErrorKind::Truncated, context + ": truncated header");
  const std::string magic = r.bytes(4);
  if (magic.compare(0, 3, "KPS") != 0)
    throw FormatError(FormatErrorKind::BadMagic, context + ": bad magic '" + magic + "'");
  if (magic[3] != '1')
    throw FormatError(FormatErrorKind::VersionMismatch,
                      context + ": unsupported KPS version '" + std::string(1, magic[3]) + "' (expected 1)");
  const std::uint32_t T = r.u32();
  const std::uint32_t D = r.u32();
  r.need(static_cast<std::size_t>(T) * D * 4);
  FrameMatrix frames(T, D);
  for (std::uint32_t t = 0; t < T; ++t)
    for (std::uint32_t j = 0; j < D; ++j) frames(t, j) = r.f32();
  return frames;
}

/// Writes frames only; label and sample id live in the manifest.
inline void write_sample(const std::filesystem::path& path, const KeypointSequence& sample) {
  write_file_bytes(path, encode_kps(sample.frames));
}

inline KeypointSequence read_sample(const std::filesystem::path& path) {
  KeypointSequence seq;
  seq.frames = decode_kps(read_file_bytes(path), path.string());
  seq.sample_id = path.stem().string();
  return seq;
}

}  // namespace besn
