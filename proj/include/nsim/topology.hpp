#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "nsim/types.hpp"

namespace nsim {

/// One bit per node; set bits are members.
using NodeMask = boost::dynamic_bitset<>;

struct TopologyConfig {
  std::uint32_t wings = 4;
  std::uint32_t leaf_switches = 84;
  std::uint32_t core_switches = 72;
  std::uint32_t switch_ports = 36;
  std::uint32_t nodes = 1500;
  std::uint32_t max_nodes_per_wing = 432;
  double intra_wing_blocking = 1.0;
  double inter_wing_blocking = 2.0;

  /// Every violated constraint, empty when the config is buildable.
  std::vector<std::string> validate() const;
};

enum class PlacementPolicy {
  pack_by_wing,  // fill one wing before spilling into others
  any,           // lowest free node ids first
};

std::string_view to_string(PlacementPolicy p);

/// Dragonfly+ fabric: nodes hang off leaf switches, leaves belong to wings,
/// and each wing owns a group of core switches. Structure is immutable after
/// construction; only the busy set changes.
class Topology {
 public:
  explicit Topology(const TopologyConfig& cfg);

  const TopologyConfig& config() const { return cfg_; }
  std::uint32_t node_count() const { return cfg_.nodes; }
  std::uint32_t wing_count() const { return cfg_.wings; }

  WingId wing_of(NodeId node) const;
  LeafId leaf_of(NodeId node) const;
  WingId wing_of_leaf(LeafId leaf) const;
  const std::vector<LeafId>& leaves_in_wing(WingId wing) const;
  const std::vector<std::uint32_t>& core_switches_in_wing(WingId wing) const;
  std::uint32_t wing_population(WingId wing) const;
  const NodeMask& wing_mask(WingId wing) const;

  /// 0 for the same node, 2 through a shared leaf, 4 across leaves of one
  /// wing, 6 between wings.
  int hop_count(NodeId a, NodeId b) const;
  /// Largest pairwise hop count inside the set (0 for a single node).
  int max_hop_count(const NodeSet& nodes) const;
  double blocking_factor(const NodeSet& nodes) const;
  std::uint32_t wing_span(const NodeSet& nodes) const;

  bool is_free(NodeId node) const;
  std::uint32_t free_count() const { return cfg_.nodes - busy_count_; }
  std::uint32_t free_in_wing(WingId wing) const;
  NodeMask free_mask() const { return ~busy_; }
  NodeMask empty_mask() const { return NodeMask(cfg_.nodes); }
  NodeMask full_mask() const { return ~NodeMask(cfg_.nodes); }

  /// Picks `n` free nodes. Returns nullopt (and changes nothing) when the
  /// request cannot be met right now. `candidates`, when given, further
  /// restricts the nodes that may be chosen.
  std::optional<NodeSet> select_nodes(std::uint32_t n, PlacementPolicy policy,
                                      std::optional<WingId> wing_restriction = std::nullopt,
                                      const NodeMask* candidates = nullptr) const;

  void allocate(const NodeSet& nodes);
  void release(const NodeSet& nodes);

  /// Multi-line summary: wing count, switch counts, per-wing populations.
  std::string describe() const;

 private:
  void check_node(NodeId node) const;
  void check_wing(WingId wing) const;

  TopologyConfig cfg_;
  std::vector<LeafId> node_leaf_;
  std::vector<WingId> node_wing_;
  std::vector<WingId> leaf_wing_;
  std::vector<std::vector<LeafId>> wing_leaves_;
  std::vector<std::vector<std::uint32_t>> wing_cores_;
  std::vector<NodeMask> wing_masks_;
  NodeMask busy_;
  std::uint32_t busy_count_ = 0;
};

/// Selection over an explicit availability mask. This is what the scheduler
/// uses to plan reservations against a projected future free set.
std::optional<NodeSet> select_from(const Topology& topo, const NodeMask& available,
                                   std::uint32_t n, PlacementPolicy policy,
                                   std::optional<WingId> wing_restriction = std::nullopt);

NodeMask to_mask(const NodeSet& nodes, std::uint32_t size);
NodeSet to_node_set(const NodeMask& mask);

}  // namespace nsim
