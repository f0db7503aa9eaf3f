#pragma once

// Plain-text `key = value` run configuration. Keys mirror long CLI flags
// (underscores and dashes are interchangeable); flags given on the command line
// take precedence over the file.

#include <algorithm>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "besn/error.hpp"
#include "besn/kps_io.hpp"

namespace besn {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text,
                                                                          const std::string& context) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(context, "line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

/// Splices config-file entries in front of the command-line flags, skipping keys
/// that the command line already sets. `args` excludes the program name.
inline std::vector<std::string> merge_config_args(const std::vector<std::string>& args,
                                                  const std::filesystem::path& config_path,
                                                  std::size_t insert_at) {
  const auto entries = parse_config_text(read_file_bytes(config_path), config_path.string());
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> injected;
  for (const auto& [key, value] : entries) {
    if (given(key)) continue;
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key + "=" + value);
    }
  }
  std::vector<std::string> merged(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(insert_at));
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(insert_at), args.end());
  return merged;
}

}  // namespace besn
