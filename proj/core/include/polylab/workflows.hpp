#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polylab/config.hpp"

namespace polylab {

enum ExitCode : int { kExitOk = 0, kExitCheckFailure = 1, kExitConfigError = 2, kExitIoError = 3 };

/// Raised for unreadable inputs or unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorkflowResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;  ///< artifacts written, in order
  std::vector<std::string> failures;         ///< ids of failed checks
};

/// Forward runs to every n of nGrid per replica; endpoint (or path) samples at max nGrid.
/// Writes replicas.jsonl and endpoints.{csv|jsonl} (paths.csv when metrics.paths).
WorkflowResult run_simulate(const RunConfig& config, const std::filesystem::path& out);

/// Runs the checks listed in verify.checks; writes verify.jsonl. Exit code 1 when a check fails.
WorkflowResult run_verify(const RunConfig& config, const std::filesystem::path& out);

/// Metric reports of the rescaled endpoint (and path marginals when metrics.paths)
/// against the Brownian limit for every n of nGrid. Writes scaling.jsonl,
/// scaling.{csv|jsonl}, scaling.dat and cdf_n<N>.csv.
WorkflowResult run_scaling(const RunConfig& config, const std::filesystem::path& out);

/// Summarizes the JSON-lines outputs found in `dir` into report.txt and
/// report_*.dat. Throws IoError when the directory holds no known outputs.
WorkflowResult run_report(const std::filesystem::path& dir);

/// Sidecar with timestamps and build information; the only nondeterministic output.
void write_run_meta(const std::filesystem::path& out, const std::string& subcommand, const RunConfig* config,
                    const std::string& started_at, const std::string& finished_at);

/// UTC time as ISO 8601.
std::string utc_timestamp();

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polylab
