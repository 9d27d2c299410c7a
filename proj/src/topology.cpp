#include "nsim/topology.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nsim {

std::string_view to_string(FileSystem fs) {
  switch (fs) {
    case FileSystem::home: return "home";
    case FileSystem::scratch: return "scratch";
    case FileSystem::project: return "project";
    case FileSystem::bb: return "bb";
    case FileSystem::hpss: return "hpss";
  }
  return "?";
}

bool parse_file_system(std::string_view text, FileSystem& out) {
  static constexpr FileSystem all[] = {FileSystem::home, FileSystem::scratch, FileSystem::project,
                                       FileSystem::bb, FileSystem::hpss};
  for (std::size_t i = 0; i < std::size(all); ++i) {
    if (text == to_string(all[i]) || text == std::to_string(i)) {
      out = all[i];
      return true;
    }
  }
  return false;
}

std::string_view to_string(PlacementPolicy p) {
  return p == PlacementPolicy::pack_by_wing ? "pack_by_wing" : "any";
}

std::vector<std::string> TopologyConfig::validate() const {
  std::vector<std::string> errors;
  if (wings == 0) errors.emplace_back("topology: wings must be at least 1");
  if (leaf_switches == 0) errors.emplace_back("topology: leaf_switches must be at least 1");
  if (nodes == 0) errors.emplace_back("topology: nodes must be at least 1");
  if (wings > 0 && leaf_switches > 0 && leaf_switches < wings)
    errors.emplace_back("topology: every wing needs a leaf switch (leaf_switches < wings)");
  if (wings > 0 && static_cast<std::uint64_t>(nodes) >
                       static_cast<std::uint64_t>(wings) * max_nodes_per_wing) {
    std::ostringstream os;
    os << "topology: " << nodes << " nodes exceed " << wings << " wings x " << max_nodes_per_wing
       << " nodes per wing";
    errors.push_back(os.str());
  }
  if (leaf_switches > 0 && switch_ports > 0 &&
      (nodes + leaf_switches - 1) / leaf_switches > switch_ports)
    errors.emplace_back("topology: more nodes per leaf than switch ports");
  if (!(intra_wing_blocking >= 1.0)) errors.emplace_back("topology: intra_wing_blocking must be >= 1");
  if (!(inter_wing_blocking >= 1.0)) errors.emplace_back("topology: inter_wing_blocking must be >= 1");
  return errors;
}

Topology::Topology(const TopologyConfig& cfg) : cfg_(cfg) {
  if (auto errors = cfg.validate(); !errors.empty()) {
    std::string msg = errors.front();
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    throw std::invalid_argument(msg);
  }

  wing_leaves_.resize(cfg.wings);
  wing_cores_.resize(cfg.wings);
  leaf_wing_.resize(cfg.leaf_switches);
  for (std::uint32_t l = 0; l < cfg.leaf_switches; ++l) {
    leaf_wing_[l] = WingId{l % cfg.wings};
    wing_leaves_[l % cfg.wings].push_back(LeafId{l});
  }
  for (std::uint32_t c = 0; c < cfg.core_switches; ++c) wing_cores_[c % cfg.wings].push_back(c);

  node_leaf_.resize(cfg.nodes);
  node_wing_.resize(cfg.nodes);
  wing_masks_.assign(cfg.wings, NodeMask(cfg.nodes));
  for (std::uint32_t i = 0; i < cfg.nodes; ++i) {
    const std::uint32_t w = i % cfg.wings;
    const std::uint32_t local = i / cfg.wings;
    const auto& leaves = wing_leaves_[w];
    node_wing_[i] = WingId{w};
    node_leaf_[i] = leaves[local % leaves.size()];
    wing_masks_[w].set(i);
  }
  busy_ = NodeMask(cfg.nodes);
}

void Topology::check_node(NodeId node) const {
  if (index(node) >= cfg_.nodes)
    throw std::out_of_range("unknown node id " + std::to_string(index(node)));
}

void Topology::check_wing(WingId wing) const {
  if (index(wing) >= cfg_.wings)
    throw std::invalid_argument("unknown wing id " + std::to_string(index(wing)));
}

WingId Topology::wing_of(NodeId node) const {
  check_node(node);
  return node_wing_[index(node)];
}

LeafId Topology::leaf_of(NodeId node) const {
  check_node(node);
  return node_leaf_[index(node)];
}

WingId Topology::wing_of_leaf(LeafId leaf) const {
  if (index(leaf) >= cfg_.leaf_switches)
    throw std::out_of_range("unknown leaf id " + std::to_string(index(leaf)));
  return leaf_wing_[index(leaf)];
}

const std::vector<LeafId>& Topology::leaves_in_wing(WingId wing) const {
  check_wing(wing);
  return wing_leaves_[index(wing)];
}

const std::vector<std::uint32_t>& Topology::core_switches_in_wing(WingId wing) const {
  check_wing(wing);
  return wing_cores_[index(wing)];
}

std::uint32_t Topology::wing_population(WingId wing) const {
  check_wing(wing);
  return static_cast<std::uint32_t>(wing_masks_[index(wing)].count());
}

const NodeMask& Topology::wing_mask(WingId wing) const {
  check_wing(wing);
  return wing_masks_[index(wing)];
}

int Topology::hop_count(NodeId a, NodeId b) const {
  check_node(a);
  check_node(b);
  if (a == b) return 0;
  if (node_leaf_[index(a)] == node_leaf_[index(b)]) return 2;
  if (node_wing_[index(a)] == node_wing_[index(b)]) return 4;
  return 6;
}

int Topology::max_hop_count(const NodeSet& nodes) const {
  if (nodes.empty()) throw std::invalid_argument("max_hop_count: empty node set");
  for (NodeId n : nodes) check_node(n);
  const NodeId first = nodes.front();
  bool many_nodes = false, many_leaves = false, many_wings = false;
  for (NodeId n : nodes) {
    many_nodes |= n != first;
    many_leaves |= node_leaf_[index(n)] != node_leaf_[index(first)];
    many_wings |= node_wing_[index(n)] != node_wing_[index(first)];
  }
  return many_wings ? 6 : many_leaves ? 4 : many_nodes ? 2 : 0;
}

std::uint32_t Topology::wing_span(const NodeSet& nodes) const {
  std::vector<bool> seen(cfg_.wings, false);
  std::uint32_t span = 0;
  for (NodeId n : nodes) {
    const auto w = index(wing_of(n));
    if (!seen[w]) {
      seen[w] = true;
      ++span;
    }
  }
  return span;
}

double Topology::blocking_factor(const NodeSet& nodes) const {
  if (nodes.empty()) throw std::invalid_argument("blocking_factor: empty node set");
  return wing_span(nodes) == 1 ? cfg_.intra_wing_blocking : cfg_.inter_wing_blocking;
}

bool Topology::is_free(NodeId node) const {
  check_node(node);
  return !busy_.test(index(node));
}

std::uint32_t Topology::free_in_wing(WingId wing) const {
  check_wing(wing);
  return static_cast<std::uint32_t>((wing_masks_[index(wing)] - busy_).count());
}

std::optional<NodeSet> Topology::select_nodes(std::uint32_t n, PlacementPolicy policy,
                                              std::optional<WingId> wing_restriction,
                                              const NodeMask* candidates) const {
  NodeMask available = ~busy_;
  if (candidates) available &= *candidates;
  return select_from(*this, available, n, policy, wing_restriction);
}

void Topology::allocate(const NodeSet& nodes) {
  for (NodeId n : nodes) {
    check_node(n);
    if (busy_.test(index(n)))
      throw std::logic_error("node " + std::to_string(index(n)) + " is already allocated");
  }
  for (NodeId n : nodes) busy_.set(index(n));
  busy_count_ = static_cast<std::uint32_t>(busy_.count());
}

void Topology::release(const NodeSet& nodes) {
  for (NodeId n : nodes) {
    check_node(n);
    if (!busy_.test(index(n)))
      throw std::logic_error("node " + std::to_string(index(n)) + " is not allocated");
  }
  for (NodeId n : nodes) busy_.reset(index(n));
  busy_count_ = static_cast<std::uint32_t>(busy_.count());
}

std::string Topology::describe() const {
  std::ostringstream os;
  os << "Dragonfly+ topology: " << cfg_.wings << " wings, " << cfg_.leaf_switches
     << " leaf switches, " << cfg_.core_switches << " core switches, " << cfg_.switch_ports
     << "-port switches\n";
  os << "nodes: " << cfg_.nodes << " (at most " << cfg_.max_nodes_per_wing << " per wing)\n";
  os << "blocking: " << cfg_.intra_wing_blocking << ":1 within a wing, "
     << cfg_.inter_wing_blocking << ":1 between wings\n";
  for (std::uint32_t w = 0; w < cfg_.wings; ++w) {
    os << "wing " << w << ": " << wing_masks_[w].count() << " nodes, " << wing_leaves_[w].size()
       << " leaves, " << wing_cores_[w].size() << " cores\n";
  }
  return os.str();
}

namespace {

NodeSet lowest(const NodeMask& mask, std::uint32_t n) {
  NodeSet out;
  out.reserve(n);
  for (auto i = mask.find_first(); i != NodeMask::npos && out.size() < n; i = mask.find_next(i))
    out.push_back(NodeId{static_cast<std::uint32_t>(i)});
  return out;
}

}  // namespace

std::optional<NodeSet> select_from(const Topology& topo, const NodeMask& available,
                                   std::uint32_t n, PlacementPolicy policy,
                                   std::optional<WingId> wing_restriction) {
  if (n == 0) throw std::invalid_argument("select_nodes: requested zero nodes");
  if (wing_restriction && index(*wing_restriction) >= topo.wing_count())
    throw std::invalid_argument("select_nodes: unknown wing id " +
                                std::to_string(index(*wing_restriction)));

  if (wing_restriction) {
    NodeMask in_wing = available & topo.wing_mask(*wing_restriction);
    if (in_wing.count() < n) return std::nullopt;
    return lowest(in_wing, n);
  }

  if (available.count() < n) return std::nullopt;
  if (policy == PlacementPolicy::any) return lowest(available, n);

  // Best fit: the fullest wing that still holds the whole job.
  const std::uint32_t wings = topo.wing_count();
  std::vector<NodeMask> per_wing;
  std::vector<std::size_t> counts;
  per_wing.reserve(wings);
  for (std::uint32_t w = 0; w < wings; ++w) {
    per_wing.push_back(available & topo.wing_mask(WingId{w}));
    counts.push_back(per_wing.back().count());
  }
  std::optional<std::uint32_t> best;
  for (std::uint32_t w = 0; w < wings; ++w) {
    if (counts[w] >= n && (!best || counts[w] < counts[*best])) best = w;
  }
  if (best) return lowest(per_wing[*best], n);

  // Spill: largest wings first so the job touches as few wings as possible.
  std::vector<std::uint32_t> order(wings);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });
  NodeSet out;
  out.reserve(n);
  for (std::uint32_t w : order) {
    auto part = lowest(per_wing[w], n - static_cast<std::uint32_t>(out.size()));
    out.insert(out.end(), part.begin(), part.end());
    if (out.size() == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

NodeMask to_mask(const NodeSet& nodes, std::uint32_t size) {
  NodeMask mask(size);
  for (NodeId n : nodes) {
    if (index(n) >= size) throw std::out_of_range("node id " + std::to_string(index(n)) + " out of range");
    mask.set(index(n));
  }
  return mask;
}

NodeSet to_node_set(const NodeMask& mask) {
  NodeSet out;
  for (auto i = mask.find_first(); i != NodeMask::npos; i = mask.find_next(i))
    out.push_back(NodeId{static_cast<std::uint32_t>(i)});
  return out;
}

}  // namespace nsim
