#include "nsim/submit_filter.hpp"

#include <sstream>
#include <stdexcept>

namespace nsim {

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::accept: return "accept";
    case VerdictKind::accept_with_warnings: return "accept_with_warnings";
    case VerdictKind::reject: return "reject";
  }
  return "?";
}

std::uint32_t partition_capacity(const Partition& p, const Topology& topo, std::uint32_t archive_nodes) {
  if (p.pool == ResourcePool::archive) return archive_nodes;
  NodeMask eligible = to_mask(p.eligible_nodes, topo.node_count());
  if (p.wing_restriction) eligible &= topo.wing_mask(*p.wing_restriction);
  return static_cast<std::uint32_t>(eligible.count());
}

namespace {

std::string hms(Seconds s) {
  std::ostringstream os;
  if (s % kHour == 0)
    os << s / kHour << " h";
  else if (s % kMinute == 0)
    os << s / kMinute << " min";
  else
    os << s << " s";
  return os.str();
}

Verdict reject(const char* rule, std::string message) {
  return Verdict{VerdictKind::reject, {Finding{rule, std::move(message)}}};
}

}  // namespace

Verdict validate_submission(const Job& job, const SchedulerConfig& cfg, const SubmissionContext& ctx) {
  const Partition* p = find_partition(cfg.partitions, job.partition);
  if (!p) return reject(rule::kUnknownPartition, "partition '" + job.partition + "' does not exist");

  const std::string where = "partition " + p->name;
  if (job.nodes_requested < p->min_nodes || job.nodes_requested < 1)
    return reject(rule::kTooFewNodes, "each job must request at least " +
                                          std::to_string(std::max<std::uint32_t>(p->min_nodes, 1)) +
                                          " node(s) in " + where);
  if (job.nodes_requested > cfg.max_job_nodes)
    return reject(rule::kManualScheduling,
                  "jobs cannot request more than " + std::to_string(cfg.max_job_nodes) +
                      " nodes; larger computations are scheduled manually, contact support");
  if (job.nodes_requested > p->max_nodes)
    return reject(rule::kTooManyNodes, where + " allows at most " + std::to_string(p->max_nodes) + " nodes per job");
  if (job.walltime_requested <= 0)
    return reject(rule::kInvalidWalltime, "walltime must be positive");
  if (job.walltime_requested < p->min_walltime)
    return reject(rule::kWalltimeTooShort, where + " requires a walltime of at least " + hms(p->min_walltime));
  if (job.walltime_requested > p->max_walltime)
    return reject(rule::kWalltimeTooLong, where + " allows a walltime of at most " + hms(p->max_walltime));
  if (ctx.topology) {
    const auto cap = partition_capacity(*p, *ctx.topology, cfg.archive_nodes);
    if (p->pool == ResourcePool::compute && job.nodes_requested > cap)
      return reject(rule::kNotEnoughNodes, where + " can reach only " + std::to_string(cap) + " nodes");
  }
  if (job.tasks_per_node < 1 || job.tasks_per_node > 80)
    return reject(rule::kTasksPerNode, "tasks per node must be between 1 and 80 (80 with hyperthreading)");

  const QosPolicy* qos = nullptr;
  try {
    qos = &resolve_qos(job, cfg.allocations, cfg.qos, cfg.qos_defaults);
  } catch (const std::invalid_argument&) {
    return reject(rule::kUnknownQos, "QoS '" + job.qos + "' does not exist");
  }
  if (qos->max_nodes_per_job && job.nodes_requested > *qos->max_nodes_per_job)
    return reject(rule::kQosNodeCap, "QoS " + qos->name + " allows at most " +
                                         std::to_string(*qos->max_nodes_per_job) + " nodes per job");
  if (qos->max_submitted_jobs && ctx.user_active_jobs >= *qos->max_submitted_jobs)
    return reject(rule::kQosJobCap, "QoS " + qos->name + " allows at most " +
                                        std::to_string(*qos->max_submitted_jobs) + " submitted jobs per user");

  Verdict v;
  if (job.submit_cwd_fs == FileSystem::home)
    v.findings.push_back({rule::kHomeReadOnly,
                          "job submitted from $HOME, which is read-only on compute nodes; "
                          "write output to $SCRATCH"});
  if (p->pool == ResourcePool::compute && job.tasks_per_node != 40 && job.tasks_per_node != 80)
    v.findings.push_back({rule::kTasksNotFull, "nodes are allocated whole; " +
                                                   std::to_string(job.tasks_per_node) +
                                                   " tasks per node leaves cores idle (use 40, or 80 with hyperthreading)"});
  if (job.needs_network)
    v.findings.push_back({rule::kNoInternet,
                          "compute nodes have no internet access; download data before submitting"});
  v.kind = v.findings.empty() ? VerdictKind::accept : VerdictKind::accept_with_warnings;
  return v;
}

std::string explain_rules(const SchedulerConfig& cfg, const std::string& name) {
  const Partition* p = find_partition(cfg.partitions, name);
  if (!p) throw std::invalid_argument("unknown partition '" + name + "'");
  std::ostringstream os;
  os << "partition " << p->name << (p->name == cfg.default_partition ? " (default)" : "") << "\n";
  os << "  nodes per job: " << p->min_nodes << " to " << std::min(p->max_nodes, cfg.max_job_nodes) << "\n";
  os << "  walltime: ";
  if (p->min_walltime > 0) os << "at least " << hms(p->min_walltime) << ", ";
  os << "at most " << hms(p->max_walltime) << "\n";
  if (p->max_jobs_per_user)
    os << "  at most " << *p->max_jobs_per_user << " job" << (*p->max_jobs_per_user == 1 ? "" : "s")
       << " per user at a time\n";
  if (p->pool == ResourcePool::archive) {
    os << "  runs on the shared archive nodes (" << cfg.archive_nodes << ")\n";
  } else {
    os << "  " << (p->node_exclusive ? "whole nodes, exclusive" : "shared nodes") << "; "
       << p->eligible_nodes.size() << " eligible nodes";
    if (!p->dedicated_nodes.empty()) os << ", " << p->dedicated_nodes.size() << " reserved for this partition";
    os << "\n";
  }
  if (p->wing_restriction) os << "  confined to wing " << index(*p->wing_restriction) << " (1:1 blocking)\n";
  os << "  priority factor: " << p->priority_factor << "\n";
  return os.str();
}

}  // namespace nsim
