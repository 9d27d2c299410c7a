#include "nsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace nsim {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, p) : std::to_string(v);
}

std::string fmt_bytes_exact(std::uint64_t b) {
  static constexpr std::pair<std::uint64_t, char> units[] = {
      {kTiB, 'T'}, {kGiB, 'G'}, {kMiB, 'M'}, {1024, 'K'}};
  if (b == 0) return "0";
  for (auto [size, suffix] : units)
    if (b % size == 0) return std::to_string(b / size) + suffix;
  return std::to_string(b);
}

/// Reads typed keys out of one section and reports unknown or malformed ones.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name, std::vector<std::string>& errors)
      : tree_(tree), name_(std::move(name)), errors_(errors) {}

  ~Section() {
    for (const auto& [key, value] : tree_)
      if (!used_.count(key)) errors_.push_back("[" + name_ + "] unknown key '" + key + "'");
  }

  const std::string& name() const { return name_; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    auto child = tree_.get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  void error(const std::string& key, const std::string& what) {
    errors_.push_back("[" + name_ + "] " + key + ": " + what);
  }

  template <class T>
  void number(const std::string& key, T& out) {
    if (auto v = raw(key)) {
      T parsed{};
      if (parse_number(*v, parsed))
        out = parsed;
      else
        error(key, "expected a number, got '" + *v + "'");
    }
  }

  void optional_count(const std::string& key, std::optional<std::uint32_t>& out) {
    if (auto v = raw(key)) {
      std::uint32_t parsed = 0;
      if (v->empty() || *v == "none")
        out.reset();
      else if (parse_number(*v, parsed))
        out = parsed;
      else
        error(key, "expected a count or empty, got '" + *v + "'");
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "yes" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "no" || *v == "0")
        out = false;
      else
        error(key, "expected true/false, got '" + *v + "'");
    }
  }

  void duration(const std::string& key, Seconds& out) {
    if (auto v = raw(key)) {
      try {
        out = parse_duration(*v);
      } catch (const std::exception& e) {
        error(key, e.what());
      }
    }
  }

  void optional_duration(const std::string& key, std::optional<Seconds>& out) {
    if (auto v = raw(key)) {
      if (v->empty() || *v == "none") {
        out.reset();
        return;
      }
      try {
        out = parse_duration(*v);
      } catch (const std::exception& e) {
        error(key, e.what());
      }
    }
  }

  void bytes(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      try {
        out = parse_bytes(*v);
      } catch (const std::exception& e) {
        error(key, e.what());
      }
    }
  }

  void optional_bytes(const std::string& key, std::optional<std::uint64_t>& out) {
    if (auto v = raw(key)) {
      if (v->empty() || *v == "none") {
        out.reset();
        return;
      }
      std::uint64_t b = 0;
      bytes(key, b);
      out = b;
    }
  }

  void nodes(const std::string& key, NodeSet& out) {
    if (auto v = raw(key)) {
      try {
        out = parse_node_ranges(*v);
      } catch (const std::exception& e) {
        error(key, e.what());
      }
    }
  }

  void text(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

void read_topology(Section& s, TopologyConfig& t) {
  s.number("wings", t.wings);
  s.number("leaf_switches", t.leaf_switches);
  s.number("core_switches", t.core_switches);
  s.number("switch_ports", t.switch_ports);
  s.number("nodes", t.nodes);
  s.number("max_nodes_per_wing", t.max_nodes_per_wing);
  s.number("intra_wing_blocking", t.intra_wing_blocking);
  s.number("inter_wing_blocking", t.inter_wing_blocking);
}

void read_scheduler(Section& s, SchedulerConfig& c) {
  s.text("default_partition", c.default_partition);
  if (auto v = s.raw("backfill")) {
    if (*v == "easy")
      c.backfill = BackfillMode::easy;
    else if (*v == "none")
      c.backfill = BackfillMode::none;
    else
      s.error("backfill", "expected easy or none");
  }
  if (auto v = s.raw("placement")) {
    if (*v == "pack_by_wing")
      c.placement = PlacementPolicy::pack_by_wing;
    else if (*v == "any")
      c.placement = PlacementPolicy::any;
    else
      s.error("placement", "expected pack_by_wing or any");
  }
  s.number("archive_nodes", c.archive_nodes);
  s.number("cores_per_node", c.cores_per_node);
  s.number("max_job_nodes", c.max_job_nodes);
  s.text("default_qos", c.qos_defaults.allocated);
  s.text("default_user_qos", c.qos_defaults.unallocated);
}

void read_weights(Section& s, PriorityWeights& w) {
  s.number("age", w.w_age);
  s.number("fairshare", w.w_fairshare);
  s.number("size", w.w_size);
  s.number("partition", w.w_partition);
  s.number("qos", w.w_qos);
  s.duration("age_saturation", w.age_saturation);
  s.duration("fairshare_window", w.fairshare_window);
}

Partition read_partition(Section& s, const std::string& name) {
  Partition p;
  p.name = name;
  s.number("min_nodes", p.min_nodes);
  s.number("max_nodes", p.max_nodes);
  s.duration("min_walltime", p.min_walltime);
  s.duration("max_walltime", p.max_walltime);
  s.nodes("dedicated_nodes", p.dedicated_nodes);
  s.nodes("eligible_nodes", p.eligible_nodes);
  s.optional_count("max_jobs_per_user", p.max_jobs_per_user);
  s.number("priority_factor", p.priority_factor);
  s.boolean("node_exclusive", p.node_exclusive);
  std::optional<std::uint32_t> wing;
  s.optional_count("wing", wing);
  if (wing) p.wing_restriction = WingId{*wing};
  if (auto v = s.raw("pool")) {
    if (*v == "compute")
      p.pool = ResourcePool::compute;
    else if (*v == "archive")
      p.pool = ResourcePool::archive;
    else
      s.error("pool", "expected compute or archive");
  }
  return p;
}

QosPolicy read_qos(Section& s, const std::string& name) {
  QosPolicy q;
  q.name = name;
  s.number("priority_boost", q.priority_boost);
  s.optional_count("max_nodes_per_job", q.max_nodes_per_job);
  s.optional_count("max_submitted_jobs", q.max_submitted_jobs);
  return q;
}

void read_fs_spec(Section& s, FileSystemSpec& f) {
  s.optional_bytes("quota", f.quota_bytes);
  if (auto v = s.raw("scope")) {
    if (*v == "user")
      f.scope = QuotaScope::user;
    else if (*v == "group")
      f.scope = QuotaScope::group;
    else
      s.error("scope", "expected user or group");
  }
  s.bytes("block_size", f.block_size);
  s.optional_duration("purge_age", f.purge_age);
  s.boolean("backed_up", f.backed_up);
  s.boolean("on_login", f.on_login);
  if (auto v = s.raw("on_compute")) {
    if (*v == "rw")
      f.on_compute = ComputeAccess::rw;
    else if (*v == "ro")
      f.on_compute = ComputeAccess::ro;
    else if (*v == "absent")
      f.on_compute = ComputeAccess::absent;
    else
      s.error("on_compute", "expected rw, ro or absent");
  }
}

void read_workload(Section& s, Config& cfg) {
  WorkloadSpec& w = cfg.workload;
  s.number("arrival_rate_per_hour", w.arrival_rate_per_hour);
  if (auto v = s.raw("sizes")) {
    std::vector<SizeClass> sizes;
    for (const auto& item : split(*v, ',')) {
      auto parts = split(item, ':');
      SizeClass c;
      if (parts.size() != 2 || !parse_number(parts[0], c.nodes) || !parse_number(parts[1], c.weight))
        s.error("sizes", "expected nodes:weight, got '" + item + "'");
      else
        sizes.push_back(c);
    }
    w.sizes = std::move(sizes);
  }
  if (auto v = s.raw("walltimes")) {
    std::vector<WalltimeClass> walls;
    for (const auto& item : split(*v, ',')) {
      auto pos = item.rfind(':');
      WalltimeClass c;
      try {
        if (pos == std::string::npos || !parse_number(item.substr(pos + 1), c.weight))
          throw std::invalid_argument("expected walltime:weight");
        c.walltime = parse_duration(item.substr(0, pos));
        walls.push_back(c);
      } catch (const std::exception&) {
        s.error("walltimes", "expected walltime:weight, got '" + item + "'");
      }
    }
    w.walltimes = std::move(walls);
  }
  s.number("runtime_log_mean", w.runtime_log_mean);
  s.number("runtime_log_sigma", w.runtime_log_sigma);
  s.number("users", w.users);
  if (auto v = s.raw("groups")) w.groups = split(*v, ',');
  s.text("partition", w.partition);
  s.number("debug_fraction", w.debug_fraction);
  s.number("hyperthread_fraction", w.hyperthread_fraction);
  s.number("home_submit_fraction", w.home_submit_fraction);
  s.number("seed", w.seed);
  s.duration("start_time", w.start_time);
  s.number("first_id", w.first_id);
  s.duration("horizon", cfg.workload_horizon);
}

void read_lpbm(Section& s, lpbm::Config& l) {
  s.number("lpbm_weight", l.weights.lpbm);
  for (std::size_t c = 0; c < lpbm::kCategoryCount; ++c) {
    const std::string name(lpbm::to_string(static_cast<lpbm::Category>(c)));
    s.number(name + "_weight", l.weights.category[c]);
    s.number(name + "_max", l.weights.max_points[c]);
  }
  s.number("shortlist", l.shortlist);
  s.boolean("per_node_scaling", l.options.per_node_scaling);
  s.number("min_nodes", l.options.min_nodes);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

Config niagara_default_config() {
  Config cfg;
  cfg.profile = "niagara-default";
  cfg.published_policy = true;

  SchedulerConfig& s = cfg.scheduler;
  const NodeSet all = parse_node_ranges("0-1499");
  const NodeSet compute_nodes = parse_node_ranges("0-1494");
  const NodeSet debug_nodes = parse_node_ranges("1495-1499");

  Partition compute;
  compute.name = "compute";
  compute.eligible_nodes = compute_nodes;
  s.partitions.push_back(compute);

  Partition debug;
  debug.name = "debug";
  debug.min_walltime = 0;
  debug.max_walltime = kHour;
  debug.dedicated_nodes = debug_nodes;
  debug.eligible_nodes = all;
  debug.max_jobs_per_user = 1;
  debug.priority_factor = 1.0;
  s.partitions.push_back(debug);

  for (std::uint32_t w = 0; w < 4; ++w) {
    Partition df = compute;
    df.name = "dragonfly" + std::to_string(w + 1);
    df.wing_restriction = WingId{w};
    s.partitions.push_back(df);
  }

  auto archive = [](std::string name, Seconds max_wall, std::uint32_t max_jobs) {
    Partition p;
    p.name = std::move(name);
    p.min_nodes = 1;
    p.max_nodes = 1;
    p.min_walltime = 0;
    p.max_walltime = max_wall;
    p.max_jobs_per_user = max_jobs;
    p.node_exclusive = false;
    p.pool = ResourcePool::archive;
    return p;
  };
  s.partitions.push_back(archive("archive-short", kHour, 75));
  s.partitions.push_back(archive("archive-long", 3 * kDay, 5));
  s.partitions.push_back(archive("archive-interactive", kHour, 48));

  s.qos["normal"] = QosPolicy{"normal", 0.0, std::nullopt, std::nullopt};
  s.qos["default"] = QosPolicy{"default", 0.0, 20, 50};
  s.qos["priority"] = QosPolicy{"priority", 1.0, std::nullopt, std::nullopt};

  s.allocations.default_pool_share = 0.06;
  for (int g = 0; g < 10; ++g) s.allocations.shares["g0" + std::to_string(g)] = 0.094;

  cfg.fs = default_fs_config();
  for (int g = 0; g < 10; ++g) cfg.fs.group_quotas["g0" + std::to_string(g)] = 100 * kTiB;

  cfg.lpbm.weights.lpbm = 50;
  cfg.lpbm.weights.category = {20, 10, 10, 5, 5};
  cfg.lpbm.weights.max_points = {10, 10, 10, 10, 10};
  return cfg;
}

std::vector<std::string> validate_config(const Config& cfg) {
  std::vector<std::string> e = cfg.topology.validate();
  const SchedulerConfig& s = cfg.scheduler;
  const std::uint32_t n = cfg.topology.nodes;

  if (s.partitions.empty()) e.emplace_back("scheduler: no partitions defined");
  if (!find_partition(s.partitions, s.default_partition))
    e.push_back("scheduler: default partition '" + s.default_partition + "' is not defined");
  if (s.cores_per_node == 0) e.emplace_back("scheduler: cores_per_node must be positive");
  if (s.max_job_nodes == 0) e.emplace_back("scheduler: max_job_nodes must be positive");

  std::set<std::string> names;
  std::vector<std::pair<std::string, NodeSet>> dedicated;
  bool any_archive = false;
  for (const auto& p : s.partitions) {
    const std::string pre = "partition " + p.name + ": ";
    if (!names.insert(p.name).second) e.push_back(pre + "defined twice");
    if (p.min_nodes < 1) e.push_back(pre + "min_nodes must be at least 1");
    if (p.min_nodes > p.max_nodes) e.push_back(pre + "min_nodes exceeds max_nodes");
    if (p.min_walltime < 0) e.push_back(pre + "min_walltime is negative");
    if (p.min_walltime > p.max_walltime) e.push_back(pre + "min_walltime exceeds max_walltime");
    if (p.max_walltime <= 0) e.push_back(pre + "max_walltime must be positive");
    if (!(p.priority_factor >= 0 && p.priority_factor <= 1)) e.push_back(pre + "priority_factor outside [0,1]");
    if (p.pool == ResourcePool::archive) {
      any_archive = true;
      if (p.node_exclusive) e.push_back(pre + "archive partitions share nodes (node_exclusive=false)");
      continue;
    }
    if (!p.node_exclusive) e.push_back(pre + "compute partitions allocate whole nodes");
    for (NodeId id : p.eligible_nodes)
      if (index(id) >= n) {
        e.push_back(pre + "eligible node " + std::to_string(index(id)) + " does not exist");
        break;
      }
    for (NodeId id : p.dedicated_nodes)
      if (!std::binary_search(p.eligible_nodes.begin(), p.eligible_nodes.end(), id)) {
        e.push_back(pre + "dedicated nodes must be eligible");
        break;
      }
    if (p.wing_restriction && index(*p.wing_restriction) >= cfg.topology.wings)
      e.push_back(pre + "wing " + std::to_string(index(*p.wing_restriction)) + " does not exist");
    if (p.eligible_nodes.empty()) e.push_back(pre + "no eligible nodes");
    if (!p.dedicated_nodes.empty()) dedicated.emplace_back(p.name, p.dedicated_nodes);
  }
  for (const auto& [owner, nodes] : dedicated) {
    for (const auto& p : s.partitions) {
      if (p.name == owner || p.pool != ResourcePool::compute) continue;
      for (NodeId id : nodes)
        if (std::binary_search(p.eligible_nodes.begin(), p.eligible_nodes.end(), id)) {
          e.push_back("partition " + p.name + ": may use node " + std::to_string(index(id)) +
                      " dedicated to " + owner);
          break;
        }
    }
  }
  if (any_archive && s.archive_nodes == 0) e.emplace_back("scheduler: archive partitions need archive_nodes > 0");

  const auto& w = s.weights;
  for (double v : {w.w_age, w.w_fairshare, w.w_size, w.w_partition, w.w_qos})
    if (!(v >= 0)) {
      e.emplace_back("weights: all weights must be nonnegative");
      break;
    }
  if (w.age_saturation <= 0) e.emplace_back("weights: age_saturation must be positive");
  if (w.fairshare_window <= 0) e.emplace_back("weights: fairshare_window must be positive");

  for (const auto& [name, q] : s.qos) {
    if (q.name != name) e.push_back("qos " + name + ": name mismatch");
    if (!(q.priority_boost >= 0 && q.priority_boost <= 1)) e.push_back("qos " + name + ": priority_boost outside [0,1]");
  }
  if (!s.qos.count(s.qos_defaults.allocated))
    e.push_back("scheduler: default QoS '" + s.qos_defaults.allocated + "' is not defined");
  if (!s.qos.count(s.qos_defaults.unallocated))
    e.push_back("scheduler: default-user QoS '" + s.qos_defaults.unallocated + "' is not defined");

  const auto& a = s.allocations;
  if (!(a.default_pool_share >= 0 && a.default_pool_share <= 1))
    e.emplace_back("allocations: default_pool_share outside [0,1]");
  double total = 0;
  for (const auto& [g, share] : a.shares) {
    if (!(share >= 0)) e.push_back("allocations: share for " + g + " is negative");
    total += share;
  }
  if (total > 1.0 - a.default_pool_share + 1e-9)
    e.emplace_back("allocations: shares exceed the allocatable fraction (1 - default_pool_share)");

  for (auto& msg : cfg.fs.validate()) e.push_back(std::move(msg));
  for (auto& msg : cfg.workload.validate()) e.push_back(std::move(msg));
  if (cfg.workload_horizon <= 0) e.emplace_back("workload: horizon must be positive");

  const auto& lw = cfg.lpbm.weights;
  if (lw.lpbm < 0) e.emplace_back("lpbm: negative LPBM weight");
  for (std::size_t c = 0; c < lpbm::kCategoryCount; ++c) {
    if (lw.category[c] < 0) e.push_back("lpbm: negative weight for " + std::string(lpbm::to_string(static_cast<lpbm::Category>(c))));
    if (!(lw.max_points[c] >= 0)) e.push_back("lpbm: negative max points");
  }
  if (cfg.lpbm.shortlist == 0) e.emplace_back("lpbm: shortlist must be at least 1");
  return e;
}

std::vector<std::string> config_warnings(const Config& cfg) {
  std::vector<std::string> w;
  if (!cfg.published_policy) return w;
  const auto& pw = cfg.scheduler.weights;
  if (pw.w_partition != 2 * pw.w_fairshare)
    w.emplace_back("weights: partition weight should be twice the fair-share weight");
  if (pw.w_qos != pw.w_fairshare) w.emplace_back("weights: QoS weight should equal the fair-share weight");
  if (!(pw.w_size < pw.w_fairshare)) w.emplace_back("weights: size weight should be below the fair-share weight");
  if (pw.age_saturation != 14 * kDay) w.emplace_back("weights: age factor should saturate after 14 days");
  if (pw.fairshare_window != 7 * kDay) w.emplace_back("weights: fair-share window should be 7 days");
  return w;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

LoadedConfig parse_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({source + ":" + std::to_string(e.line()) + ": " + e.message()});
  }

  LoadedConfig out;
  out.config = niagara_default_config();
  Config& cfg = out.config;
  std::vector<std::string> errors;

  bool saw_partitions = false, saw_qos = false, saw_alloc = false;
  std::vector<Partition> partitions;
  QosTable qos;
  Allocations alloc;
  std::map<std::string, std::uint64_t> group_quotas;
  bool saw_group_quotas = false;

  for (const auto& [name, body] : tree) {
    if (body.empty()) {
      errors.push_back(source + ": key '" + name + "' outside of any section");
      continue;
    }
    Section s(body, name, errors);
    if (name == "profile") {
      s.text("name", cfg.profile);
      s.boolean("published_policy", cfg.published_policy);
    } else if (name == "topology") {
      read_topology(s, cfg.topology);
    } else if (name == "scheduler") {
      read_scheduler(s, cfg.scheduler);
    } else if (name == "weights") {
      read_weights(s, cfg.scheduler.weights);
    } else if (name == "allocations") {
      saw_alloc = true;
      for (const auto& [group, value] : body) {
        if (group == "default_pool_share") {
          s.number("default_pool_share", alloc.default_pool_share);
        } else {
          double share = 0;
          s.number(group, share);
          alloc.shares[group] = share;
        }
      }
    } else if (starts_with(name, "partitions.")) {
      saw_partitions = true;
      partitions.push_back(read_partition(s, name.substr(11)));
    } else if (starts_with(name, "qos.")) {
      saw_qos = true;
      qos[name.substr(4)] = read_qos(s, name.substr(4));
    } else if (name == "fs") {
      s.bytes("bb_capacity", cfg.fs.bb_capacity);
      s.duration("purge_scan_interval", cfg.fs.purge_scan_interval);
    } else if (name == "fs.group_quotas") {
      saw_group_quotas = true;
      for (const auto& [group, value] : body) {
        std::uint64_t q = 0;
        s.bytes(group, q);
        group_quotas[group] = q;
      }
    } else if (starts_with(name, "fs.")) {
      FileSystem fs{};
      if (!parse_file_system(name.substr(3), fs)) {
        errors.push_back("unknown file system section [" + name + "]");
        continue;
      }
      auto it = std::find_if(cfg.fs.file_systems.begin(), cfg.fs.file_systems.end(),
                             [&](const FileSystemSpec& f) { return f.fs == fs; });
      read_fs_spec(s, *it);
    } else if (name == "workload") {
      read_workload(s, cfg);
    } else if (name == "lpbm") {
      read_lpbm(s, cfg.lpbm);
    } else {
      errors.push_back("unknown section [" + name + "]");
      for (const auto& [key, value] : body) s.raw(key);
    }
  }
  if (saw_partitions) cfg.scheduler.partitions = std::move(partitions);
  if (saw_qos) cfg.scheduler.qos = std::move(qos);
  if (saw_alloc) cfg.scheduler.allocations = std::move(alloc);
  if (saw_group_quotas) cfg.fs.group_quotas = std::move(group_quotas);

  for (auto& e : validate_config(cfg)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  out.warnings = config_warnings(cfg);
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  return parse_config(in, path.string());
}

void write_config(std::ostream& out, const Config& cfg) {
  auto opt = [](const auto& o) { return o ? std::to_string(*o) : std::string(); };
  out << "[profile]\nname = " << cfg.profile << "\npublished_policy = " << (cfg.published_policy ? "true" : "false")
      << "\n\n";

  const auto& t = cfg.topology;
  out << "[topology]\nwings = " << t.wings << "\nleaf_switches = " << t.leaf_switches
      << "\ncore_switches = " << t.core_switches << "\nswitch_ports = " << t.switch_ports
      << "\nnodes = " << t.nodes << "\nmax_nodes_per_wing = " << t.max_nodes_per_wing
      << "\nintra_wing_blocking = " << fmt_double(t.intra_wing_blocking)
      << "\ninter_wing_blocking = " << fmt_double(t.inter_wing_blocking) << "\n\n";

  const auto& s = cfg.scheduler;
  out << "[scheduler]\ndefault_partition = " << s.default_partition
      << "\nbackfill = " << (s.backfill == BackfillMode::easy ? "easy" : "none")
      << "\nplacement = " << to_string(s.placement) << "\narchive_nodes = " << s.archive_nodes
      << "\ncores_per_node = " << s.cores_per_node << "\nmax_job_nodes = " << s.max_job_nodes
      << "\ndefault_qos = " << s.qos_defaults.allocated
      << "\ndefault_user_qos = " << s.qos_defaults.unallocated << "\n\n";

  const auto& w = s.weights;
  out << "[weights]\nage = " << fmt_double(w.w_age) << "\nfairshare = " << fmt_double(w.w_fairshare)
      << "\nsize = " << fmt_double(w.w_size) << "\npartition = " << fmt_double(w.w_partition)
      << "\nqos = " << fmt_double(w.w_qos) << "\nage_saturation = " << format_duration(w.age_saturation)
      << "\nfairshare_window = " << format_duration(w.fairshare_window) << "\n\n";

  out << "[allocations]\ndefault_pool_share = " << fmt_double(s.allocations.default_pool_share) << "\n";
  for (const auto& [g, share] : s.allocations.shares) out << g << " = " << fmt_double(share) << "\n";
  out << "\n";

  for (const auto& [name, q] : s.qos) {
    out << "[qos." << name << "]\npriority_boost = " << fmt_double(q.priority_boost)
        << "\nmax_nodes_per_job = " << opt(q.max_nodes_per_job)
        << "\nmax_submitted_jobs = " << opt(q.max_submitted_jobs) << "\n\n";
  }

  for (const auto& p : s.partitions) {
    out << "[partitions." << p.name << "]\npool = "
        << (p.pool == ResourcePool::compute ? "compute" : "archive") << "\nmin_nodes = " << p.min_nodes
        << "\nmax_nodes = " << p.max_nodes << "\nmin_walltime = " << format_duration(p.min_walltime)
        << "\nmax_walltime = " << format_duration(p.max_walltime)
        << "\neligible_nodes = " << format_node_ranges(p.eligible_nodes)
        << "\ndedicated_nodes = " << format_node_ranges(p.dedicated_nodes)
        << "\nmax_jobs_per_user = " << opt(p.max_jobs_per_user)
        << "\npriority_factor = " << fmt_double(p.priority_factor)
        << "\nnode_exclusive = " << (p.node_exclusive ? "true" : "false") << "\nwing = "
        << (p.wing_restriction ? std::to_string(index(*p.wing_restriction)) : std::string()) << "\n\n";
  }

  out << "[fs]\nbb_capacity = " << fmt_bytes_exact(cfg.fs.bb_capacity)
      << "\npurge_scan_interval = " << format_duration(cfg.fs.purge_scan_interval) << "\n\n";
  for (const auto& f : cfg.fs.file_systems) {
    out << "[fs." << to_string(f.fs) << "]\nquota = " << (f.quota_bytes ? fmt_bytes_exact(*f.quota_bytes) : "")
        << "\nscope = " << (f.scope == QuotaScope::user ? "user" : "group")
        << "\nblock_size = " << fmt_bytes_exact(f.block_size)
        << "\npurge_age = " << (f.purge_age ? format_duration(*f.purge_age) : "")
        << "\nbacked_up = " << (f.backed_up ? "true" : "false")
        << "\non_login = " << (f.on_login ? "true" : "false") << "\non_compute = "
        << (f.on_compute == ComputeAccess::rw ? "rw" : f.on_compute == ComputeAccess::ro ? "ro" : "absent")
        << "\n\n";
  }
  out << "[fs.group_quotas]\n";
  for (const auto& [g, q] : cfg.fs.group_quotas) out << g << " = " << fmt_bytes_exact(q) << "\n";
  out << "\n";

  const auto& wl = cfg.workload;
  out << "[workload]\narrival_rate_per_hour = " << fmt_double(wl.arrival_rate_per_hour) << "\nsizes = ";
  for (std::size_t i = 0; i < wl.sizes.size(); ++i)
    out << (i ? "," : "") << wl.sizes[i].nodes << ':' << fmt_double(wl.sizes[i].weight);
  out << "\nwalltimes = ";
  for (std::size_t i = 0; i < wl.walltimes.size(); ++i)
    out << (i ? "," : "") << format_duration(wl.walltimes[i].walltime) << ':'
        << fmt_double(wl.walltimes[i].weight);
  out << "\nruntime_log_mean = " << fmt_double(wl.runtime_log_mean)
      << "\nruntime_log_sigma = " << fmt_double(wl.runtime_log_sigma) << "\nusers = " << wl.users
      << "\ngroups = ";
  for (std::size_t i = 0; i < wl.groups.size(); ++i) out << (i ? "," : "") << wl.groups[i];
  out << "\npartition = " << wl.partition << "\ndebug_fraction = " << fmt_double(wl.debug_fraction)
      << "\nhyperthread_fraction = " << fmt_double(wl.hyperthread_fraction)
      << "\nhome_submit_fraction = " << fmt_double(wl.home_submit_fraction) << "\nseed = " << wl.seed
      << "\nstart_time = " << format_duration(wl.start_time) << "\nfirst_id = " << wl.first_id
      << "\nhorizon = " << format_duration(cfg.workload_horizon) << "\n\n";

  const auto& l = cfg.lpbm;
  out << "[lpbm]\nlpbm_weight = " << fmt_double(l.weights.lpbm) << "\n";
  for (std::size_t c = 0; c < lpbm::kCategoryCount; ++c) {
    const auto name = lpbm::to_string(static_cast<lpbm::Category>(c));
    out << name << "_weight = " << fmt_double(l.weights.category[c]) << "\n"
        << name << "_max = " << fmt_double(l.weights.max_points[c]) << "\n";
  }
  out << "shortlist = " << l.shortlist << "\nper_node_scaling = " << (l.options.per_node_scaling ? "true" : "false")
      << "\nmin_nodes = " << l.options.min_nodes << "\n";
}

NodeSet parse_node_ranges(const std::string& text) {
  NodeSet out;
  for (const auto& item : split(text, ',')) {
    const auto dash = item.find('-');
    std::uint32_t lo = 0, hi = 0;
    if (dash == std::string::npos) {
      if (!parse_number(item, lo)) throw std::invalid_argument("bad node id '" + item + "'");
      hi = lo;
    } else if (!parse_number(trim(item.substr(0, dash)), lo) ||
               !parse_number(trim(item.substr(dash + 1)), hi) || lo > hi) {
      throw std::invalid_argument("bad node range '" + item + "'");
    }
    for (std::uint64_t i = lo; i <= hi; ++i) out.push_back(NodeId{static_cast<std::uint32_t>(i)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_node_ranges(const NodeSet& nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size();) {
    std::size_t j = i;
    while (j + 1 < nodes.size() && index(nodes[j + 1]) == index(nodes[j]) + 1) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(index(nodes[i]));
    if (j > i) out += '-' + std::to_string(index(nodes[j]));
    i = j + 1;
  }
  return out;
}

Seconds parse_duration(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw std::invalid_argument("empty duration");
  Seconds v = 0;
  if (text.find(':') != std::string::npos) {
    // [D-]HH:MM:SS or MM:SS
    Seconds days = 0;
    std::string rest = text;
    if (auto dash = text.find('-'); dash != std::string::npos) {
      if (!parse_number(text.substr(0, dash), days)) throw std::invalid_argument("bad duration '" + text + "'");
      rest = text.substr(dash + 1);
    }
    auto parts = split(rest, ':');
    if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("bad duration '" + text + "'");
    Seconds acc = 0;
    for (const auto& p : parts) {
      Seconds x = 0;
      if (!parse_number(p, x) || x < 0) throw std::invalid_argument("bad duration '" + text + "'");
      acc = acc * 60 + x;
    }
    return days * kDay + acc;
  }
  Seconds unit = 1;
  std::string digits = text;
  switch (text.back()) {
    case 's': unit = 1; digits.pop_back(); break;
    case 'm': unit = kMinute; digits.pop_back(); break;
    case 'h': unit = kHour; digits.pop_back(); break;
    case 'd': unit = kDay; digits.pop_back(); break;
    default: break;
  }
  if (!parse_number(digits, v) || v < 0) throw std::invalid_argument("bad duration '" + text + "'");
  return v * unit;
}

std::string format_duration(Seconds s) {
  if (s != 0 && s % kDay == 0) return std::to_string(s / kDay) + "d";
  if (s != 0 && s % kHour == 0) return std::to_string(s / kHour) + "h";
  if (s != 0 && s % kMinute == 0) return std::to_string(s / kMinute) + "m";
  return std::to_string(s) + "s";
}

std::uint64_t parse_bytes(const std::string& raw) {
  std::string text = trim(raw);
  if (text.empty()) throw std::invalid_argument("empty size");
  std::uint64_t unit = 1;
  switch (text.back()) {
    case 'K': unit = 1024; break;
    case 'M': unit = kMiB; break;
    case 'G': unit = kGiB; break;
    case 'T': unit = kTiB; break;
    case 'P': unit = 1024 * kTiB; break;
    default: break;
  }
  if (unit != 1) text.pop_back();
  std::uint64_t v = 0;
  if (!parse_number(text, v)) throw std::invalid_argument("bad size '" + raw + "'");
  return v * unit;
}

}  // namespace nsim
