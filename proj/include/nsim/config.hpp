#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsim/fspolicy.hpp"
#include "nsim/lpbm.hpp"
#include "nsim/policy.hpp"
#include "nsim/priority.hpp"
#include "nsim/topology.hpp"
#include "nsim/workload.hpp"

namespace nsim {

enum class BackfillMode { easy, none };

struct SchedulerConfig {
  std::vector<Partition> partitions;
  std::string default_partition = "compute";
  PriorityWeights weights;
  QosTable qos;
  QosDefaults qos_defaults;
  Allocations allocations;
  BackfillMode backfill = BackfillMode::easy;
  PlacementPolicy placement = PlacementPolicy::pack_by_wing;
  std::uint32_t archive_nodes = 2;
  std::uint32_t cores_per_node = 40;
  /// Anything bigger is scheduled by hand, outside the batch system.
  std::uint32_t max_job_nodes = 1000;
};

struct Config {
  std::string profile = "niagara-default";
  /// Profiles claiming to follow the published policy get warnings when
  /// their weights break its ratios.
  bool published_policy = true;
  TopologyConfig topology;
  SchedulerConfig scheduler;
  FsConfig fs;
  WorkloadSpec workload;
  Seconds workload_horizon = 7 * kDay;
  lpbm::Config lpbm;
};

/// The stock 1500-node, 4-wing system with its partitions, weights, QoS,
/// allocations and file systems.
Config niagara_default_config();

/// Every hard violation in the config (empty when valid).
std::vector<std::string> validate_config(const Config& cfg);
/// Soft findings, e.g. weight ratios that differ from the published policy.
std::vector<std::string> config_warnings(const Config& cfg);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct LoadedConfig {
  Config config;
  std::vector<std::string> warnings;
};

/// Parses an INI-style profile layered over the built-in defaults. A file
/// that defines any `[partitions.*]`, `[qos.*]` or `[allocations]` section
/// replaces that whole table. Throws ConfigError listing every problem.
LoadedConfig parse_config(std::istream& in, const std::string& source = "<config>");
LoadedConfig load_config(const std::filesystem::path& path);

/// Writes a profile that parse_config reads back to an equal Config.
void write_config(std::ostream& out, const Config& cfg);

/// `0-3,7,9-10` style node lists.
NodeSet parse_node_ranges(const std::string& text);
std::string format_node_ranges(const NodeSet& nodes);

/// `90`, `15m`, `24h`, `3d`, `01:30:00`, `2-00:00:00`.
Seconds parse_duration(const std::string& text);
std::string format_duration(Seconds s);

/// `512`, `1M`, `100G`, `25T` (binary multiples).
std::uint64_t parse_bytes(const std::string& text);

}  // namespace nsim
