#pragma once

// JSON manifest and split-aware dataset loading.
//
// {
//   "feature_dim": 126,
//   "classes": ["book", "drink", ...],
//   "entries": [
//     {"sample_id": "00335", "path": "samples/00335.kps", "label": "book",
//      "split": "train", "signer_id": "118"},
//     ...
//   ]
// }
//
// Entry paths are relative to the manifest's directory. `sample_id` defaults to
// the path stem; `classes` defaults to the sorted set of labels.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "besn/error.hpp"
#include "besn/keypoints.hpp"
#include "besn/kps_io.hpp"

namespace besn {

enum class Split { Train, Val, Test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

inline std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "val") return Split::Val;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

struct ManifestEntry {
  std::string path;
  std::string label;
  Split split = Split::Train;
  std::string sample_id;
  std::optional<std::string> signer_id;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::size_t feature_dim = 0;
  std::vector<std::string> classes;
};

struct Dataset {
  std::vector<std::string> classes;
  std::size_t feature_dim = 0;
  std::vector<KeypointSequence> train;
  std::vector<KeypointSequence> val;
  std::vector<KeypointSequence> test;
  std::vector<std::string> rejected;  // sample ids dropped as too short

  const std::vector<KeypointSequence>& split(Split s) const {
    switch (s) {
      case Split::Train: return train;
      case Split::Val: return val;
      case Split::Test: return test;
    }
    return train;
  }
  std::vector<KeypointSequence>& split(Split s) {
    return const_cast<std::vector<KeypointSequence>&>(std::as_const(*this).split(s));
  }
};

inline nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries) {
    nlohmann::json j = {{"sample_id", e.sample_id}, {"path", e.path}, {"label", e.label},
                        {"split", std::string(to_string(e.split))}};
    if (e.signer_id) j["signer_id"] = *e.signer_id;
    entries.push_back(std::move(j));
  }
  return {{"feature_dim", m.feature_dim}, {"classes", m.classes}, {"entries", std::move(entries)}};
}

inline void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  write_file_bytes(path, manifest_to_json(m).dump(2) + "\n");
}

/// Parses and validates the manifest structure (does not touch sample files).
inline Manifest parse_manifest(const std::string& text, const std::string& context = "manifest") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": invalid JSON: " + e.what());
  }
  Manifest m;
  try {
    m.feature_dim = j.at("feature_dim").get<std::size_t>();
    if (j.contains("classes")) m.classes = j.at("classes").get<std::vector<std::string>>();
    const auto& entries = j.at("entries");
    if (!entries.is_array()) throw DataError(context + ": 'entries' must be an array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      entry.label = e.at("label").get<std::string>();
      const auto split_text = e.at("split").get<std::string>();
      auto split = parse_split(split_text);
      if (!split)
        throw DataError(context + ": entry " + std::to_string(i) + " ('" + entry.path + "') has unknown split '" +
                        split_text + "'");
      entry.split = *split;
      entry.sample_id = e.contains("sample_id") ? e.at("sample_id").get<std::string>()
                                                : std::filesystem::path(entry.path).stem().string();
      if (e.contains("signer_id") && !e.at("signer_id").is_null())
        entry.signer_id = e.at("signer_id").is_string() ? e.at("signer_id").get<std::string>()
                                                        : e.at("signer_id").dump();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": malformed manifest: " + e.what());
  }
  if (m.feature_dim < 1) throw DataError(context + ": feature_dim must be >= 1");

  std::unordered_set<std::string> paths, ids;
  for (const auto& e : m.entries) {
    if (!paths.insert(e.path).second) throw DataError(context + ": duplicate path '" + e.path + "'");
    if (!ids.insert(e.sample_id).second) throw DataError(context + ": duplicate sample id '" + e.sample_id + "'");
  }
  if (m.classes.empty()) {
    std::set<std::string> unique;
    for (const auto& e : m.entries) unique.insert(e.label);
    m.classes.assign(unique.begin(), unique.end());
  } else {
    std::unordered_set<std::string> known(m.classes.begin(), m.classes.end());
    if (known.size() != m.classes.size()) throw DataError(context + ": duplicate class in 'classes'");
    for (const auto& e : m.entries) {
      if (!known.count(e.label))
        throw DataError(context + ": entry '" + e.sample_id + "' has label '" + e.label + "' not in classes");
    }
  }
  return m;
}

struct LoadOptions {
  bool center_wrists = false;
  std::ostream* warnings = &std::cerr;
};

/// Loads, validates and cleans every sample, keeping manifest order within each split.
inline Dataset load_dataset(const std::filesystem::path& manifest_path, const LoadOptions& opts = {}) {
  if (!std::filesystem::exists(manifest_path))
    throw DataError("manifest '" + manifest_path.string() + "' does not exist");
  const Manifest m = parse_manifest(read_file_bytes(manifest_path), manifest_path.string());
  const auto root = manifest_path.parent_path();

  Dataset ds;
  ds.classes = m.classes;
  ds.feature_dim = m.feature_dim;
  for (const auto& e : m.entries) {
    const auto path = root / e.path;
    if (!std::filesystem::exists(path))
      throw DataError("sample '" + e.sample_id + "': file '" + path.string() + "' does not exist");
    KeypointSequence seq = read_sample(path);
    seq.label = e.label;
    seq.sample_id = e.sample_id;
    if (seq.feature_dim() != m.feature_dim)
      throw DataError("sample '" + e.sample_id + "' (" + e.path + "): feature dim " +
                      std::to_string(seq.feature_dim()) + " does not match manifest feature_dim " +
                      std::to_string(m.feature_dim));
    try {
      seq = clean_sequence(std::move(seq));
    } catch (const ShortSequenceError& err) {
      if (opts.warnings) *opts.warnings << "warning: rejecting sample '" << e.sample_id << "': " << err.what() << "\n";
      ds.rejected.push_back(e.sample_id);
      continue;
    }
    if (opts.center_wrists) center_wrists(seq);
    ds.split(e.split).push_back(std::move(seq));
  }

  if (ds.train.empty()) throw DataError("empty split: train");
  std::set<std::string> in_train;
  for (const auto& s : ds.train) in_train.insert(s.label);
  for (const auto& c : ds.classes) {
    if (!in_train.count(c)) throw DataError("class " + c + " absent from train");
  }
  return ds;
}

}  // namespace besn
