#include "nsim/fairshare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsim {

const Partition* find_partition(const std::vector<Partition>& partitions, const std::string& name) {
  for (const auto& p : partitions)
    if (p.name == name) return &p;
  return nullptr;
}

FairShareLedger::FairShareLedger(Allocations allocations, Seconds window)
    : allocations_(std::move(allocations)), window_(window) {
  if (window_ <= 0) throw std::invalid_argument("fair-share window must be positive");
}

void FairShareLedger::record_usage(const std::string& group, std::uint32_t nodes, Seconds seconds,
                                   Seconds now) {
  if (seconds <= 0) throw std::invalid_argument("record_usage: seconds must be positive");
  record_node_seconds(group, static_cast<std::int64_t>(nodes) * seconds, now);
}

void FairShareLedger::record_node_seconds(const std::string& group, std::int64_t node_seconds,
                                          Seconds now) {
  if (node_seconds <= 0) return;
  auto pos = std::upper_bound(records_.begin(), records_.end(), now,
                              [](Seconds t, const Record& r) { return t < r.time; });
  records_.insert(pos, Record{now, group, node_seconds});
  per_group_[group] += node_seconds;
  total_ += node_seconds;
}

void FairShareLedger::evict(Seconds now) {
  while (!records_.empty() && now - records_.front().time > window_) {
    const Record& r = records_.front();
    auto it = per_group_.find(r.group);
    it->second -= r.node_seconds;
    if (it->second == 0) per_group_.erase(it);
    total_ -= r.node_seconds;
    records_.pop_front();
  }
}

std::int64_t FairShareLedger::usage(const std::string& group, Seconds now) {
  evict(now);
  auto it = per_group_.find(group);
  return it == per_group_.end() ? 0 : it->second;
}

std::int64_t FairShareLedger::total_usage(Seconds now) {
  evict(now);
  return total_;
}

double FairShareLedger::usage_fraction(const std::string& group, Seconds now) {
  evict(now);
  if (total_ == 0) return 0.0;
  return static_cast<double>(usage(group, now)) / static_cast<double>(total_);
}

double FairShareLedger::target_share(const std::string& group, Seconds now) {
  if (auto it = allocations_.shares.find(group); it != allocations_.shares.end() && it->second > 0)
    return it->second;
  evict(now);
  std::size_t active = per_group_.count(group) ? 0 : 1;
  for (const auto& [g, used] : per_group_)
    if (!allocations_.is_allocated(g)) ++active;
  return allocations_.default_pool_share / static_cast<double>(active);
}

double FairShareLedger::fairshare_factor(const std::string& group, Seconds now) {
  const double used = usage_fraction(group, now);
  if (used == 0.0) return 1.0;
  const double share = target_share(group, now);
  if (share <= 0.0) return 0.0;
  return std::exp2(-used / share);
}

}  // namespace nsim
