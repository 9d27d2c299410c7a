#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsim/types.hpp"

namespace nsim {

struct Job {
  JobId id = 0;
  std::string user;
  std::string group;
  std::string partition = "compute";
  std::uint32_t nodes_requested = 1;
  Seconds walltime_requested = kHour;
  std::uint32_t tasks_per_node = 40;
  Seconds submit_time = 0;
  Seconds actual_runtime = 0;
  std::string qos;  // empty: pick from the user's allocation status
  FileSystem submit_cwd_fs = FileSystem::scratch;
  bool needs_network = false;

  /// Runtime the job will actually occupy its nodes for.
  Seconds effective_runtime() const { return std::min(actual_runtime, walltime_requested); }
  bool hyperthreaded() const { return tasks_per_node > 40; }

  friend bool operator==(const Job&, const Job&) = default;
};

/// Checks the invariants every Job must satisfy; empty when valid.
std::vector<std::string> job_violations(const Job& job);

struct TraceDiagnostic {
  std::size_t line = 0;
  std::string message;
};

struct TraceParseResult {
  std::vector<Job> jobs;
  std::vector<TraceDiagnostic> diagnostics;
  std::size_t skipped = 0;
};

/// Reads an SWF-style trace. The 18 standard columns are followed by up to
/// three optional extension columns: tasks_per_node, submit_cwd_fs and
/// needs_network. Column 8 (requested processors) carries the node count,
/// since this cluster schedules whole nodes. User, group, queue and
/// partition columns accept either names or SWF numeric ids.
TraceParseResult parse_trace(std::istream& in);
/// Throws std::runtime_error when the file cannot be opened.
TraceParseResult parse_trace(const std::filesystem::path& path);

/// Writes jobs in the format parse_trace reads; names are written verbatim.
void emit_trace(std::ostream& out, const std::vector<Job>& jobs);

struct SizeClass {
  std::uint32_t nodes = 1;
  double weight = 1.0;
};

struct WalltimeClass {
  Seconds walltime = kHour;
  double weight = 1.0;
};

struct WorkloadSpec {
  double arrival_rate_per_hour = 10.0;
  std::vector<SizeClass> sizes{{1, 4}, {2, 3}, {4, 3}, {8, 2}, {16, 2}, {32, 1}, {64, 1}, {128, 0.5}};
  std::vector<WalltimeClass> walltimes{{kHour, 1}, {6 * kHour, 2}, {12 * kHour, 2}, {24 * kHour, 3}};
  double runtime_log_mean = 9.5;   // log-seconds
  double runtime_log_sigma = 1.0;
  std::uint32_t users = 40;
  std::vector<std::string> groups{"g00", "g01", "g02", "g03", "g04",
                                  "g05", "g06", "g07", "g08", "g09"};
  std::string partition = "compute";
  double debug_fraction = 0.0;         // short jobs routed to the debug partition
  double hyperthread_fraction = 0.0;   // jobs asking for 80 tasks/node
  double home_submit_fraction = 0.0;   // jobs submitted from $HOME
  std::uint64_t seed = 1;
  Seconds start_time = 0;
  JobId first_id = 1;

  std::vector<std::string> validate() const;
};

/// Poisson arrivals over [start_time, start_time + horizon). A zero rate gives
/// an empty workload; negative rates or a nonpositive horizon throw.
std::vector<Job> generate_workload(const WorkloadSpec& spec, Seconds horizon);

}  // namespace nsim
