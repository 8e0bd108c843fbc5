#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fluct::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigError = 2, kResourceCap = 3 };

struct RunConfig {
  std::string command;  ///< oracle | expand | verify
  std::string target;   ///< expand: tau0 | local | taux
  std::string model;
  long horizon = 8192;
  int terms = 2;
  long x_lo = 1;
  long x_hi = 1;
  bool x_given = false;
  long x_max = 30;
  std::string mode = "float";  ///< rational | float
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool check_polyharmonic = false;
};

/// "a..b" or "a". Throws Config.
std::pair<long, long> parse_range(const std::string& text);

/// Throws Config on invalid combinations.
void validate(const RunConfig& cfg);

/// Runs a validated config; returns the exit code. Human-readable lines go
/// to `out`, artifacts to cfg.out_dir.
int run(const RunConfig& cfg, std::ostream& out);

/// Parses argv, runs, and maps errors to exit codes.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fluct::cli
