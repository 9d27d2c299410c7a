#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsim/types.hpp"

namespace nsim {

/// Which physical resource a partition draws from.
enum class ResourcePool {
  compute,  // the fabric nodes, allocated exclusively
  archive,  // shared data-mover nodes in front of the tape archive
};

struct Partition {
  std::string name;
  std::uint32_t min_nodes = 1;
  std::uint32_t max_nodes = 1000;
  Seconds min_walltime = 15 * kMinute;
  Seconds max_walltime = 24 * kHour;
  NodeSet dedicated_nodes;  // only this partition may use them
  NodeSet eligible_nodes;   // includes dedicated_nodes
  std::optional<std::uint32_t> max_jobs_per_user;  // simultaneous running jobs
  double priority_factor = 0.5;
  bool node_exclusive = true;
  std::optional<WingId> wing_restriction;
  ResourcePool pool = ResourcePool::compute;
};

struct PriorityWeights {
  double w_age = 500;
  double w_fairshare = 1000;
  double w_size = 100;
  double w_partition = 2000;
  double w_qos = 1000;
  Seconds age_saturation = 14 * kDay;
  Seconds fairshare_window = 7 * kDay;
};

struct QosPolicy {
  std::string name;
  double priority_boost = 0.0;
  std::optional<std::uint32_t> max_nodes_per_job;
  std::optional<std::uint32_t> max_submitted_jobs;  // pending + running, per user
};

using QosTable = std::map<std::string, QosPolicy>;

/// Awarded target shares. Groups missing here are "default" groups and share
/// the unallocated pool.
struct Allocations {
  std::map<std::string, double> shares;
  double default_pool_share = 0.06;

  bool is_allocated(const std::string& group) const {
    auto it = shares.find(group);
    return it != shares.end() && it->second > 0;
  }
};

const Partition* find_partition(const std::vector<Partition>& partitions, const std::string& name);

}  // namespace nsim
