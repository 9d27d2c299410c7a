#pragma once

// Builders shared by the unit and acceptance suites.

#include <string>

#include "nsim/config.hpp"
#include "nsim/workload.hpp"

namespace nsim::testing {

inline Job make_job(JobId id, std::uint32_t nodes, Seconds walltime, Seconds runtime, Seconds submit = 0,
                    std::string user = "alice", std::string group = "g00",
                    std::string partition = "compute") {
  Job j;
  j.id = id;
  j.user = std::move(user);
  j.group = std::move(group);
  j.partition = std::move(partition);
  j.nodes_requested = nodes;
  j.walltime_requested = walltime;
  j.actual_runtime = std::min(runtime, walltime);
  j.submit_time = submit;
  return j;
}

/// A scaled-down cluster: one exclusive "compute" partition over every node,
/// no debug reservation, groups g00/g01 each holding 0.47 of the machine.
inline Config small_config(std::uint32_t nodes, std::uint32_t wings = 1, std::uint32_t leaves = 0) {
  Config cfg = niagara_default_config();
  cfg.profile = "test-small";
  cfg.topology.nodes = nodes;
  cfg.topology.wings = wings;
  cfg.topology.leaf_switches = leaves ? leaves : std::max<std::uint32_t>(wings, (nodes + 17) / 18);
  cfg.topology.core_switches = wings;
  cfg.topology.max_nodes_per_wing = 432;

  Partition compute;
  compute.name = "compute";
  compute.max_nodes = nodes;
  for (std::uint32_t i = 0; i < nodes; ++i) compute.eligible_nodes.push_back(NodeId{i});
  cfg.scheduler.partitions = {compute};
  cfg.scheduler.max_job_nodes = std::max<std::uint32_t>(nodes, 1000);
  cfg.scheduler.allocations.shares = {{"g00", 0.47}, {"g01", 0.47}};
  return cfg;
}

}  // namespace nsim::testing
