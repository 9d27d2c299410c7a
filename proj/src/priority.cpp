#include "nsim/priority.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsim {

PriorityFactors priority_factors(const Job& job, Seconds now, double fairshare, const PriorityWeights& weights,
                                 const Partition& part, const QosPolicy& qos) {
  PriorityFactors f;
  const Seconds queued = std::max<Seconds>(0, now - job.submit_time);
  f.age = weights.age_saturation > 0
              ? std::min(1.0, static_cast<double>(queued) / static_cast<double>(weights.age_saturation))
              : 1.0;
  f.fairshare = fairshare;
  f.size = part.max_nodes > 0
               ? std::min(1.0, static_cast<double>(job.nodes_requested) / part.max_nodes)
               : 0.0;
  f.partition = std::clamp(part.priority_factor, 0.0, 1.0);
  f.qos = std::clamp(qos.priority_boost, 0.0, 1.0);
  return f;
}

PriorityFactors priority_factors(const Job& job, Seconds now, FairShareLedger& ledger,
                                 const PriorityWeights& weights,
                                 const std::vector<Partition>& partitions, const QosPolicy& qos) {
  const Partition* part = find_partition(partitions, job.partition);
  if (!part) throw std::invalid_argument("job " + std::to_string(job.id) +
                                         " references unknown partition '" + job.partition + "'");
  return priority_factors(job, now, ledger.fairshare_factor(job.group, now), weights, *part, qos);
}

double weighted_priority(const PriorityFactors& f, const PriorityWeights& w) {
  return w.w_age * f.age + w.w_fairshare * f.fairshare + w.w_size * f.size +
         w.w_partition * f.partition + w.w_qos * f.qos;
}

double compute_priority(const Job& job, Seconds now, FairShareLedger& ledger,
                        const PriorityWeights& weights, const std::vector<Partition>& partitions,
                        const QosPolicy& qos) {
  return weighted_priority(priority_factors(job, now, ledger, weights, partitions, qos), weights);
}

const QosPolicy& resolve_qos(const Job& job, const Allocations& allocations, const QosTable& table,
                             const QosDefaults& defaults) {
  const std::string& name = !job.qos.empty()                   ? job.qos
                            : allocations.is_allocated(job.group) ? defaults.allocated
                                                                  : defaults.unallocated;
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown QoS '" + name + "'");
  return it->second;
}

}  // namespace nsim
