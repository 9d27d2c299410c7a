#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string_view>
#include <tuple>
#include <vector>

#include "nsim/types.hpp"

namespace nsim {

/// Declaration order is the pop order for events sharing a timestamp: nodes
/// are released before new work arrives, and the scheduler sees both.
enum class EventKind : std::uint8_t { job_end = 0, job_arrival = 1, scheduler_pass = 2, purge_scan = 3 };

constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::job_end: return "end";
    case EventKind::job_arrival: return "arrival";
    case EventKind::scheduler_pass: return "pass";
    case EventKind::purge_scan: return "purge_scan";
  }
  return "?";
}

struct SimEvent {
  Seconds time = 0;
  EventKind kind = EventKind::scheduler_pass;
  std::optional<JobId> job;
  std::uint64_t sequence = 0;

  auto key() const { return std::tuple(time, kind, sequence); }
};

/// Min-queue over (time, kind, insertion sequence). Two queues fed the same
/// pushes pop in the same order.
class EventQueue {
 public:
  void push(Seconds time, EventKind kind, std::optional<JobId> job = std::nullopt) {
    heap_.push(SimEvent{time, kind, job, next_sequence_++});
  }

  SimEvent pop() {
    SimEvent e = heap_.top();
    heap_.pop();
    return e;
  }

  const SimEvent& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const { return a.key() > b.key(); }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace nsim
