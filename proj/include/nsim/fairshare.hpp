#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>

#include "nsim/policy.hpp"

namespace nsim {

/// Delivered node-seconds per group over an exact trailing window.
///
/// Records are evicted lazily, at the first query whose clock has moved past
/// them. Queries must therefore see a non-decreasing clock.
class FairShareLedger {
 public:
  FairShareLedger(Allocations allocations, Seconds window = 7 * kDay);

  /// Adds `nodes * seconds` node-seconds for `group`, stamped at `now`.
  void record_usage(const std::string& group, std::uint32_t nodes, Seconds seconds, Seconds now);
  void record_node_seconds(const std::string& group, std::int64_t node_seconds, Seconds now);

  /// Drops every record older than the window (age > window).
  void evict(Seconds now);

  /// Group's node-seconds in the window ending at `now`.
  std::int64_t usage(const std::string& group, Seconds now);
  std::int64_t total_usage(Seconds now);
  /// Group's fraction of all node-seconds delivered in the window; 0 when
  /// nothing was delivered.
  double usage_fraction(const std::string& group, Seconds now);

  /// Effective target share. Groups without an allocation split the default
  /// pool evenly among the default groups active in the window.
  double target_share(const std::string& group, Seconds now);

  /// 2^(-U/S): 1 at zero usage, 0.5 when the group used exactly its share.
  double fairshare_factor(const std::string& group, Seconds now);

  const Allocations& allocations() const { return allocations_; }
  Seconds window() const { return window_; }
  std::size_t record_count() const { return records_.size(); }

 private:
  struct Record {
    Seconds time;
    std::string group;
    std::int64_t node_seconds;
  };

  Allocations allocations_;
  Seconds window_;
  std::deque<Record> records_;
  std::map<std::string, std::int64_t> per_group_;
  std::int64_t total_ = 0;
};

/// Free-function forms matching the operation names used elsewhere.
inline double compute_fairshare_factor(const std::string& group, FairShareLedger& ledger, Seconds now) {
  return ledger.fairshare_factor(group, now);
}

}  // namespace nsim
