#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmplab::cli {

/// Exit codes: 0 success / acceptance pass, 1 acceptance failure, 2 usage or
/// input error.
enum ExitCode : int { kOk = 0, kAcceptanceFailure = 1, kUsageError = 2 };

/// Provenance record written next to experiment outputs.
struct RunManifest {
  std::vector<std::string> command_line;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string version;
  std::vector<std::string> outputs;
  std::size_t workers = 1;
  std::string status;
  double wall_clock_seconds = 0.0;
  std::string seed_derivation;
};

std::string manifest_to_json(const RunManifest& manifest);

/// Entry point for the `cmplab` executable: sample | eval | best | construct | experiment.
int run(int argc, char** argv);

}  // namespace cmplab::cli
