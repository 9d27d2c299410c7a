#pragma once

#include <string>
#include <vector>

#include "nsim/fairshare.hpp"
#include "nsim/policy.hpp"
#include "nsim/workload.hpp"

namespace nsim {

/// Normalized multifactor inputs, each in [0,1].
struct PriorityFactors {
  double age = 0;
  double fairshare = 0;
  double size = 0;
  double partition = 0;
  double qos = 0;
};

PriorityFactors priority_factors(const Job& job, Seconds now, FairShareLedger& ledger,
                                 const PriorityWeights& weights,
                                 const std::vector<Partition>& partitions, const QosPolicy& qos);

/// Same factors with the fair-share value and partition already resolved.
PriorityFactors priority_factors(const Job& job, Seconds now, double fairshare, const PriorityWeights& weights,
                                 const Partition& partition, const QosPolicy& qos);
double weighted_priority(const PriorityFactors& f, const PriorityWeights& w);

/// Weighted sum of age, fair-share, size, partition and QoS factors.
/// Throws std::invalid_argument for an unknown partition.
double compute_priority(const Job& job, Seconds now, FairShareLedger& ledger,
                        const PriorityWeights& weights, const std::vector<Partition>& partitions,
                        const QosPolicy& qos);

/// QoS names used when a job does not ask for one.
struct QosDefaults {
  std::string allocated = "normal";
  std::string unallocated = "default";
};

/// The job's named QoS, or the default for its group's allocation status.
/// Throws std::invalid_argument when the name is not in the table.
const QosPolicy& resolve_qos(const Job& job, const Allocations& allocations, const QosTable& table,
                             const QosDefaults& defaults);

}  // namespace nsim
