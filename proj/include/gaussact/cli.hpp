#pragma once

// Command-line experiment runner: parse an invocation, load a JSON config,
// execute a named check suite against the library, write a JSON report plus
// CSV tables, and map the outcome to a process exit code.
//
// Exit codes: 0 every check passed, 1 at least one check failed, 2 bad
// invocation or config (unparseable, unknown key, ill-typed or out-of-domain
// value), 3 a resource cap was exceeded.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaussact/fock.hpp"

namespace gaussact::cli {

using fock::DomainError;
using fock::ResourceError;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceCap = 3;

/// Parsed invocation `run <suite> --config <path> [--out <dir>] [--parallel]
/// [--seed <n>]`.
struct CliArgs {
  std::string suite;
  std::string config_path;
  std::string out_dir = ".";
  bool parallel = false;
  std::optional<std::uint64_t> seed;
};

/// Parse raw arguments (without the program name).  Throws DomainError on a
/// malformed invocation.
CliArgs parse_args(const std::vector<std::string>& args);

/// One named residual check with its pinned tolerance; passes when
/// residual <= tolerance.
struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

/// Outcome of one suite: the effective config (defaults filled in), the
/// checks, and the CSV tables written, keyed by table name.
struct SuiteReport {
  std::string suite;
  std::string config_echo;
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> tables;

  bool all_pass() const;
};

/// The individual suite names in canonical execution order.
const std::vector<std::string>& suite_names();

/// Execute one suite.  `config_text` is a JSON object with the suite's
/// parameters; missing keys take their defaults, unknown or ill-typed keys
/// throw DomainError.  `seed_override` replaces the config seed.  CSV tables
/// land under `out_dir` (created if needed).  Throws ResourceError when a
/// cap is exceeded.
SuiteReport run_suite(const std::string& suite, const std::string& config_text,
                      const std::string& out_dir, bool parallel = false,
                      std::optional<std::uint64_t> seed_override = {});

/// Canonical JSON rendering {suite, config, checks: [{name, pass, residual,
/// tolerance}], tables: {name: csv_path}}; byte-stable for a fixed config
/// and seed within one build.
std::string report_to_json(const SuiteReport& report);

/// Full run: parse arguments, load the config file, execute the named suite
/// (or, for "all", every suite with the config sectioned by suite name),
/// write <suite>_report.json under the output directory, and print one line
/// per check.  Returns the exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace gaussact::cli
