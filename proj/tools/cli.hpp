#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rightmost::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the driver.
enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kGuardTripped = 3,
  kNoData = 4,
};

/// Everything that determines a run. threads and out do not influence the
/// numbers and are left out of the provenance header, which keeps output
/// byte-identical across thread counts and destinations.
struct RunConfig {
  std::string subcommand;
  double p = 0.4;
  int n = 10;
  std::vector<int> n_list;
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  int window = 0;  // 0: sized automatically
  int r = 3;
  std::string initial = "origin";
  int w = 10;
  std::string mode = "project";
  std::int64_t min_count = 30;
  std::int64_t beta_trials = 0;  // 0: same as trials
  int threads = 0;               // 0: RIGHTMOST_THREADS, else all cores
  std::string out;
  std::string format = "csv";

  /// Provenance header as a JSON object string.
  std::string header_json() const;
};

/// Runs the driver with argv-style arguments; argv[0] is the program name.
/// Results go to `out` unless --out names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rightmost::cli
