#pragma once

#include <cstdint>
#include <string>

#include "cforge/matcore.hpp"

namespace cforge {

// Exit codes: 0 success, 1 a certified bound failed beyond tolerance,
// 2 input/validation error, 3 numerical non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundViolation = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string command;  // decompose2 peel fack nilify bridge rosenblum det
                        // regroup suzuki kernel compare gen
  std::string input_path;
  std::string output_path;
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  long long n = 0;       // command-specific size / count
  long long N = 0;       // command-specific power / node count
  double gamma = 0.25;
  double eps = 0.125;
  long long grid = 8;
  int jobs = 1;
  bool report_only = false;  // write the report but never exit 1

  void validate() const;
};

// Dispatches one command (or a {"jobs": [...]} manifest) and writes the JSON
// report. Reports are byte-deterministic; timing goes to stdout only.
int run(const RunConfig& config);

}  // namespace cforge
