#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsim/simulator.hpp"

namespace nsim {

/// Allocated compute node-seconds over total node-seconds in [t0, t1).
/// Every node counts in the denominator, reserved debug nodes included.
double utilization(const SimulationResult& result, Seconds t0, Seconds t1);

struct UtilizationBucket {
  Seconds start = 0;
  Seconds end = 0;
  double utilization = 0.0;
  double cpu_days = 0.0;  // busy cores x days
};

/// Fixed-width buckets over [t0, t1); the last one may be shorter.
std::vector<UtilizationBucket> utilization_series(const SimulationResult& result, Seconds t0, Seconds t1,
                                                  Seconds bucket);

struct QsumRow {
  std::string user;
  std::uint32_t running_jobs = 0;
  std::uint64_t running_cores = 0;
  std::uint32_t pending_jobs = 0;
  std::uint64_t pending_cores = 0;
  double mean_walltime = 0.0;  // over this user's queued and running jobs, seconds
  bool default_user = false;
};

struct QsumReport {
  std::vector<QsumRow> rows;  // by user name
  QsumRow totals;
  /// Share of all cores held by running jobs of default (unallocated) users.
  double default_user_fraction = 0.0;
};

/// Queue snapshot by user at `now`.
QsumReport qsum(const SimulationResult& result, Seconds now);

struct JobFilter {
  std::optional<std::string> partition;
  std::optional<std::string> user;
  std::optional<std::string> group;

  bool matches(const JobRecord& r) const;
};

struct WaitStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;  // nearest-rank
};

/// Start minus submit over jobs that started.
WaitStats wait_time_stats(const SimulationResult& result, const JobFilter& filter = {});

struct LocalityRow {
  JobId id = 0;
  std::string partition;
  std::uint32_t nodes = 0;
  std::uint32_t wing_span = 0;
  double blocking_factor = 1.0;
  int max_hops = 0;
};

/// Placement quality of every compute job that started.
std::vector<LocalityRow> locality_report(const SimulationResult& result);

/// Compute node-seconds delivered per group inside [t0, t1).
std::map<std::string, std::int64_t> delivered_node_seconds(const SimulationResult& result, Seconds t0,
                                                           Seconds t1);

void write_utilization_csv(std::ostream& out, const std::vector<UtilizationBucket>& buckets);
void write_qsum(std::ostream& out, const QsumReport& report);
/// One row per label; pair with kWaitStatsHeader.
void write_wait_stats(std::ostream& out, const std::string& label, const WaitStats& stats);
inline constexpr const char* kWaitStatsHeader = "label,count,mean_s,median_s,p95_s";
void write_locality_csv(std::ostream& out, const std::vector<LocalityRow>& rows);

}  // namespace nsim
