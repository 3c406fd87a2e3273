#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace nashpde {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNonConvergence = 2,
  kExitVerification = 3,
};

struct CliOptions {
  std::filesystem::path config;
  std::optional<std::string> solver;  // "cg" or "gmres"; chosen from the problem when unset
  double rtol = 1e-10;
  std::uint64_t seed = 1;
  int threads = 1;
  bool literal_coefficients = false;
  std::filesystem::path out = "nashpde_out";
  int max_pairs = 4;
  bool check_manifest = false;
  bool dump_dense = false;
};

const char* tool_version();

/// Writes report.json, manifest.json, control_player<i>.csv and state.csv.
int cmd_solve(const CliOptions& options, std::ostream& log);
/// Gradient, adjoint, Nash and equivalence certification; writes report.json.
int cmd_verify(const CliOptions& options, std::ostream& log);
/// Dense ground truth at small scale; writes report.json.
int cmd_oracle(const CliOptions& options, std::ostream& log);

/// Dispatches on "solve", "verify" or "oracle".
int run_command(const std::string& command, const CliOptions& options, std::ostream& log);

}  // namespace nashpde
