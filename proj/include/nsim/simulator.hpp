#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nsim/config.hpp"
#include "nsim/event_queue.hpp"
#include "nsim/fairshare.hpp"
#include "nsim/fspolicy.hpp"
#include "nsim/topology.hpp"
#include "nsim/workload.hpp"

namespace nsim {

enum class JobPhase { submitted, pending, running, completed, rejected, cancelled };
std::string_view to_string(JobPhase p);
bool parse_job_phase(std::string_view text, JobPhase& out);

struct JobRecord {
  Job job;
  JobPhase phase = JobPhase::submitted;
  std::string qos;  // effective QoS
  bool default_user = false;
  ResourcePool pool = ResourcePool::compute;
  std::optional<Seconds> start_time;
  std::optional<Seconds> end_time;
  NodeSet allocated_nodes;
  std::uint32_t wing_span = 0;
  double blocking_factor = 0.0;
  int max_hops = 0;
  std::string reason;  // rule id for rejected jobs
  std::vector<std::string> warnings;

  Seconds wait_time() const { return start_time ? *start_time - job.submit_time : 0; }
};

struct UtilizationSample {
  Seconds time = 0;
  std::uint32_t busy_nodes = 0;
};

struct SimulationResult {
  std::uint32_t total_nodes = 0;
  std::uint32_t cores_per_node = 40;
  Seconds start_time = 0;
  Seconds end_time = 0;
  std::vector<JobRecord> jobs;  // by job id
  std::vector<std::string> event_log;
  /// Busy compute nodes, one sample per change.
  std::vector<UtilizationSample> utilization;
  std::size_t scheduler_passes = 0;
  std::size_t files_purged = 0;

  const JobRecord* find(JobId id) const;
};

/// Discrete-event model of the batch system: arrivals go through the
/// submission filter, a scheduler pass orders pending jobs by multifactor
/// priority and starts what fits, reserving nodes for the top blocked job
/// (EASY backfill). The loop is single threaded and fully deterministic.
class Simulator {
 public:
  /// Throws ConfigError when the configuration is invalid.
  explicit Simulator(Config cfg);

  /// Queues the job's arrival event at its submit time.
  void submit(const Job& job);
  /// Scratch/bb inventory examined by the periodic purge scans.
  void add_files(std::vector<FileRecord> files);

  /// Processes the next event; false once the queue is empty.
  bool step();
  /// Drains every event and returns the collected result.
  SimulationResult run();

  /// Runs one scheduling pass at `now` and returns the jobs it started.
  std::vector<std::pair<JobId, NodeSet>> scheduler_pass(Seconds now);

  const Config& config() const { return cfg_; }
  const Topology& topology() const { return topo_; }
  FairShareLedger& ledger() { return ledger_; }
  const BurstBuffer& burst_buffer() const { return bb_; }
  const JobRecord& record(JobId id) const;
  std::vector<JobId> pending_jobs() const { return pending_; }
  std::uint32_t busy_nodes() const { return topo_.node_count() - topo_.free_count(); }
  Seconds now() const { return now_; }
  const std::vector<FileRecord>& files() const { return files_; }
  const std::vector<std::string>& event_log() const { return log_; }

  /// Priority the scheduler would assign to a pending job at `now`.
  double job_priority(JobId id, Seconds now);

 private:
  struct Reservation {
    Seconds start = 0;
    NodeMask nodes;
  };

  JobRecord& rec(JobId id);
  struct PassState {
    std::optional<Reservation> reservation;
    bool blocked = false;
    std::size_t rejected = 0;
    std::vector<std::pair<JobId, NodeSet>> started;
  };

  /// One pending job's turn within a scheduler pass.
  void consider(JobId id, Seconds now, PassState& st);
  void on_arrival(JobId id);
  void on_end(JobId id);
  void on_purge_scan();
  void request_pass(Seconds t);
  void accrue_usage(Seconds t);
  void start_job(JobRecord& r, NodeSet nodes);
  void start_archive_job(JobRecord& r);
  void sample_utilization();
  std::optional<NodeSet> select_for(const JobRecord& r, const NodeMask& available) const;
  std::optional<Reservation> plan_reservation(const JobRecord& r) const;
  std::size_t partition_index(const std::string& name) const;
  void log(const std::string& line);

  Config cfg_;
  Topology topo_;
  FairShareLedger ledger_;
  BurstBuffer bb_;
  EventQueue events_;
  Seconds now_ = 0;
  bool started_ = false;
  Seconds first_time_ = 0;
  Seconds last_accrual_ = 0;
  std::optional<Seconds> pass_requested_at_;
  bool purge_scheduled_ = false;

  std::vector<JobRecord> records_;
  std::unordered_map<JobId, std::size_t> by_id_;
  std::vector<JobId> pending_;
  std::vector<JobId> running_;
  std::map<std::pair<std::string, std::string>, std::uint32_t> running_per_user_partition_;
  std::map<std::pair<std::string, std::string>, std::uint32_t> active_per_user_qos_;
  std::vector<std::uint32_t> archive_load_;
  std::vector<NodeMask> eligible_;   // per partition, wing restriction applied
  std::vector<NodeMask> dedicated_;  // per partition
  std::vector<std::uint32_t> capacity_;
  std::vector<FileRecord> files_;
  std::vector<std::string> log_;
  std::vector<UtilizationSample> utilization_;
  std::size_t passes_ = 0;
  std::size_t purged_ = 0;
};

/// Submits every job, drains the event queue and returns the result.
SimulationResult run_simulation(const std::vector<Job>& workload, const Config& cfg);

/// One line per job, comma separated, with a `#` metadata line and a header.
void write_job_records(std::ostream& out, const SimulationResult& result);
/// Reads what write_job_records wrote (event log and samples are not kept).
SimulationResult read_job_records(std::istream& in);
void write_event_log(std::ostream& out, const SimulationResult& result);

}  // namespace nsim
