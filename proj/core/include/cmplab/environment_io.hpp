#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cmplab/environment.hpp"

namespace cmplab {

/// Environment documents are JSON objects {"n": int, "m": int, "p": [[[...]]]}
/// with p nested [state][action][next_state]. Doubles are written in shortest
/// round-trip form, so save/load reproduces every entry bit-exactly.
std::string environment_to_json(const Environment& env);

struct EnvironmentLoadOptions {
  double tolerance = kRowSumTolerance;
  /// Rescale rows whose sums drift beyond tolerance. Off by default: a silent
  /// fix would hide a corrupted file.
  bool renormalize = false;
};

/// Throws FormatError on malformed documents or invalid probabilities.
Environment environment_from_json(std::string_view text, const EnvironmentLoadOptions& options = {});

void save_environment(const Environment& env, const std::filesystem::path& path);
Environment load_environment(const std::filesystem::path& path,
                             const EnvironmentLoadOptions& options = {});

/// Whole-file read/write helpers shared by the report writers.
std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename, so readers never see a partial file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace cmplab
