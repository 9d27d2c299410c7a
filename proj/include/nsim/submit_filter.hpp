#pragma once

#include <string>
#include <vector>

#include "nsim/config.hpp"
#include "nsim/topology.hpp"
#include "nsim/workload.hpp"

namespace nsim {

enum class VerdictKind { accept, accept_with_warnings, reject };

/// Stable identifiers for every rule; messages carry the details.
namespace rule {
inline constexpr const char* kUnknownPartition = "unknown-partition";
inline constexpr const char* kTooFewNodes = "below-min-nodes";
inline constexpr const char* kTooManyNodes = "above-max-nodes";
inline constexpr const char* kManualScheduling = "needs-manual-scheduling";
inline constexpr const char* kWalltimeTooShort = "below-min-walltime";
inline constexpr const char* kWalltimeTooLong = "above-max-walltime";
inline constexpr const char* kInvalidWalltime = "invalid-walltime";
inline constexpr const char* kNotEnoughNodes = "exceeds-partition-capacity";
inline constexpr const char* kTasksPerNode = "tasks-per-node-out-of-range";
inline constexpr const char* kUnknownQos = "unknown-qos";
inline constexpr const char* kQosNodeCap = "qos-node-cap";
inline constexpr const char* kQosJobCap = "qos-job-cap";
inline constexpr const char* kHomeReadOnly = "home-is-read-only";
inline constexpr const char* kTasksNotFull = "tasks-per-node-unusual";
inline constexpr const char* kNoInternet = "no-internet-on-compute";
}  // namespace rule

struct Finding {
  std::string rule;
  std::string message;
  friend bool operator==(const Finding&, const Finding&) = default;
};

struct Verdict {
  VerdictKind kind = VerdictKind::accept;
  std::vector<Finding> findings;  // the rejection reason, or the warnings
};

/// What the filter may know about the submitting user's queue.
struct SubmissionContext {
  /// Jobs this user already has pending or running under the same QoS.
  std::uint32_t user_active_jobs = 0;
  /// When set, node counts are checked against what the partition can reach.
  const Topology* topology = nullptr;
};

/// Hard limits are checked first, in a fixed order, and the first failure
/// rejects. Warnings are only collected for jobs that pass every limit.
Verdict validate_submission(const Job& job, const SchedulerConfig& cfg,
                            const SubmissionContext& ctx = {});

/// Nodes a partition can ever give one job (wing restriction applied).
std::uint32_t partition_capacity(const Partition& p, const Topology& topo, std::uint32_t archive_nodes);

/// Human-readable limits for one partition, built from the live config.
/// Throws std::invalid_argument for an unknown partition.
std::string explain_rules(const SchedulerConfig& cfg, const std::string& partition);

std::string_view to_string(VerdictKind k);

}  // namespace nsim
