#include "nsim/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nsim/priority.hpp"
#include "nsim/submit_filter.hpp"

namespace nsim {

std::string_view to_string(JobPhase p) {
  switch (p) {
    case JobPhase::submitted: return "submitted";
    case JobPhase::pending: return "pending";
    case JobPhase::running: return "running";
    case JobPhase::completed: return "completed";
    case JobPhase::rejected: return "rejected";
    case JobPhase::cancelled: return "cancelled";
  }
  return "?";
}

bool parse_job_phase(std::string_view text, JobPhase& out) {
  for (auto p : {JobPhase::submitted, JobPhase::pending, JobPhase::running, JobPhase::completed,
                 JobPhase::rejected, JobPhase::cancelled}) {
    if (to_string(p) == text) {
      out = p;
      return true;
    }
  }
  return false;
}

const JobRecord* SimulationResult::find(JobId id) const {
  auto it = std::lower_bound(jobs.begin(), jobs.end(), id,
                             [](const JobRecord& r, JobId v) { return r.job.id < v; });
  return it != jobs.end() && it->job.id == id ? &*it : nullptr;
}

namespace {

Config checked(Config cfg) {
  if (auto errors = validate_config(cfg); !errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::uint64_t bb_user_quota(const FsConfig& fs) {
  const auto& spec = fs.spec(FileSystem::bb);
  return spec.quota_bytes.value_or(fs.bb_capacity);
}

std::string stamp(Seconds t) {
  std::ostringstream os;
  os << std::setw(10) << std::setfill('0') << t;
  return os.str();
}

}  // namespace

Simulator::Simulator(Config cfg)
    : cfg_(checked(std::move(cfg))),
      topo_(cfg_.topology),
      ledger_(cfg_.scheduler.allocations, cfg_.scheduler.weights.fairshare_window),
      bb_(cfg_.fs.bb_capacity, bb_user_quota(cfg_.fs)) {
  archive_load_.assign(cfg_.scheduler.archive_nodes, 0);
  for (const auto& p : cfg_.scheduler.partitions) {
    NodeMask eligible = topo_.empty_mask();
    NodeMask dedicated = topo_.empty_mask();
    if (p.pool == ResourcePool::compute) {
      eligible = to_mask(p.eligible_nodes, topo_.node_count());
      if (p.wing_restriction) eligible &= topo_.wing_mask(*p.wing_restriction);
      dedicated = to_mask(p.dedicated_nodes, topo_.node_count()) & eligible;
    }
    capacity_.push_back(partition_capacity(p, topo_, cfg_.scheduler.archive_nodes));
    eligible_.push_back(std::move(eligible));
    dedicated_.push_back(std::move(dedicated));
  }
}

void Simulator::submit(const Job& job) {
  if (by_id_.count(job.id)) throw std::invalid_argument("duplicate job id " + std::to_string(job.id));
  if (started_ && job.submit_time < now_)
    throw std::invalid_argument("job " + std::to_string(job.id) + " submitted in the past");
  JobRecord r;
  r.job = job;
  by_id_.emplace(job.id, records_.size());
  records_.push_back(std::move(r));
  events_.push(job.submit_time, EventKind::job_arrival, job.id);
}

void Simulator::add_files(std::vector<FileRecord> files) {
  files_.insert(files_.end(), std::make_move_iterator(files.begin()), std::make_move_iterator(files.end()));
}

JobRecord& Simulator::rec(JobId id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw std::out_of_range("unknown job id " + std::to_string(id));
  return records_[it->second];
}

const JobRecord& Simulator::record(JobId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw std::out_of_range("unknown job id " + std::to_string(id));
  return records_[it->second];
}

std::size_t Simulator::partition_index(const std::string& name) const {
  const auto& parts = cfg_.scheduler.partitions;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].name == name) return i;
  throw std::invalid_argument("unknown partition '" + name + "'");
}

void Simulator::log(const std::string& line) { log_.push_back(stamp(now_) + ' ' + line); }

bool Simulator::step() {
  if (events_.empty()) return false;
  const SimEvent e = events_.pop();
  if (!started_) {
    started_ = true;
    first_time_ = last_accrual_ = e.time;
    now_ = e.time;
    events_.push(e.time + cfg_.fs.purge_scan_interval, EventKind::purge_scan);
  }
  now_ = e.time;
  accrue_usage(now_);
  switch (e.kind) {
    case EventKind::job_arrival: on_arrival(*e.job); break;
    case EventKind::job_end: on_end(*e.job); break;
    case EventKind::scheduler_pass:
      pass_requested_at_.reset();
      scheduler_pass(now_);
      break;
    case EventKind::purge_scan: on_purge_scan(); break;
  }
  return true;
}

SimulationResult Simulator::run() {
  while (step()) {
  }
  SimulationResult out;
  out.total_nodes = topo_.node_count();
  out.cores_per_node = cfg_.scheduler.cores_per_node;
  out.start_time = first_time_;
  out.end_time = now_;
  out.jobs = records_;
  std::sort(out.jobs.begin(), out.jobs.end(),
            [](const JobRecord& a, const JobRecord& b) { return a.job.id < b.job.id; });
  out.event_log = log_;
  out.utilization = utilization_;
  out.scheduler_passes = passes_;
  out.files_purged = purged_;
  return out;
}

void Simulator::request_pass(Seconds t) {
  if (pass_requested_at_ == t) return;
  pass_requested_at_ = t;
  events_.push(t, EventKind::scheduler_pass);
}

void Simulator::accrue_usage(Seconds t) {
  if (t <= last_accrual_) return;
  std::map<std::string, std::int64_t> delivered;
  for (JobId id : running_) {
    const JobRecord& r = rec(id);
    if (r.pool != ResourcePool::compute) continue;
    const Seconds from = std::max(last_accrual_, *r.start_time);
    if (t > from) delivered[r.job.group] += static_cast<std::int64_t>(r.allocated_nodes.size()) * (t - from);
  }
  for (const auto& [group, ns] : delivered) ledger_.record_node_seconds(group, ns, t);
  last_accrual_ = t;
}

void Simulator::on_arrival(JobId id) {
  JobRecord& r = rec(id);
  const auto& sc = cfg_.scheduler;
  std::string qos_name = r.job.qos;
  try {
    qos_name = resolve_qos(r.job, sc.allocations, sc.qos, sc.qos_defaults).name;
  } catch (const std::invalid_argument&) {
  }
  SubmissionContext ctx;
  ctx.topology = &topo_;
  if (auto it = active_per_user_qos_.find({r.job.user, qos_name}); it != active_per_user_qos_.end())
    ctx.user_active_jobs = it->second;

  const Verdict v = validate_submission(r.job, sc, ctx);
  if (v.kind == VerdictKind::reject) {
    r.phase = JobPhase::rejected;
    r.reason = v.findings.front().rule;
    log("reject job=" + std::to_string(id) + " rule=" + r.reason);
    return;
  }
  for (const auto& f : v.findings) r.warnings.push_back(f.rule);
  r.qos = qos_name;
  r.default_user = !sc.allocations.is_allocated(r.job.group);
  r.pool = find_partition(sc.partitions, r.job.partition)->pool;
  r.phase = JobPhase::pending;
  pending_.push_back(id);
  ++active_per_user_qos_[{r.job.user, r.qos}];
  std::ostringstream os;
  os << "arrival job=" << id << " user=" << r.job.user << " group=" << r.job.group
     << " partition=" << r.job.partition << " nodes=" << r.job.nodes_requested
     << " walltime=" << r.job.walltime_requested;
  for (const auto& w : r.warnings) os << " warn=" << w;
  log(os.str());
  request_pass(now_);
}

void Simulator::on_end(JobId id) {
  JobRecord& r = rec(id);
  if (r.pool == ResourcePool::compute)
    topo_.release(r.allocated_nodes);
  else
    --archive_load_[index(r.allocated_nodes.front())];
  r.phase = JobPhase::completed;
  r.end_time = now_;
  running_.erase(std::find(running_.begin(), running_.end(), id));
  --running_per_user_partition_[{r.job.user, r.job.partition}];
  --active_per_user_qos_[{r.job.user, r.qos}];
  const auto freed = bb_.on_job_end(id);
  sample_utilization();
  log("end job=" + std::to_string(id) + " bb_freed=" + std::to_string(freed));
  request_pass(now_);
}

void Simulator::on_purge_scan() {
  const auto candidates = purge_scan(files_, now_, cfg_.fs);
  if (!candidates.empty()) {
    std::vector<FileRecord> kept;
    kept.reserve(files_.size() - candidates.size());
    std::size_t c = 0;
    for (auto& f : files_) {
      if (c < candidates.size() && f.path == candidates[c].path && f.fs == candidates[c].fs) {
        ++c;
        continue;
      }
      kept.push_back(std::move(f));
    }
    files_ = std::move(kept);
    purged_ += candidates.size();
  }
  log("purge_scan candidates=" + std::to_string(candidates.size()));
  if (!events_.empty()) events_.push(now_ + cfg_.fs.purge_scan_interval, EventKind::purge_scan);
}

void Simulator::sample_utilization() {
  const std::uint32_t busy = busy_nodes();
  if (!utilization_.empty() && utilization_.back().time == now_)
    utilization_.back().busy_nodes = busy;
  else
    utilization_.push_back({now_, busy});
}

void Simulator::start_job(JobRecord& r, NodeSet nodes) {
  topo_.allocate(nodes);
  r.allocated_nodes = std::move(nodes);
  r.start_time = now_;
  r.phase = JobPhase::running;
  r.wing_span = topo_.wing_span(r.allocated_nodes);
  r.blocking_factor = topo_.blocking_factor(r.allocated_nodes);
  r.max_hops = topo_.max_hop_count(r.allocated_nodes);
  running_.push_back(r.job.id);
  ++running_per_user_partition_[{r.job.user, r.job.partition}];
  events_.push(now_ + r.job.effective_runtime(), EventKind::job_end, r.job.id);
  bb_.on_job_start(r.job.id, r.job.user);
  sample_utilization();
  log("start job=" + std::to_string(r.job.id) + " nodes=" + format_node_ranges(r.allocated_nodes) +
      " wings=" + std::to_string(r.wing_span) + (r.job.hyperthreaded() ? " ht=1" : ""));
}

void Simulator::start_archive_job(JobRecord& r) {
  const auto it = std::min_element(archive_load_.begin(), archive_load_.end());
  const auto slot = static_cast<std::uint32_t>(it - archive_load_.begin());
  ++*it;
  r.allocated_nodes = {NodeId{slot}};
  r.start_time = now_;
  r.phase = JobPhase::running;
  r.wing_span = 0;
  r.blocking_factor = 1.0;
  r.max_hops = 0;
  running_.push_back(r.job.id);
  ++running_per_user_partition_[{r.job.user, r.job.partition}];
  events_.push(now_ + r.job.effective_runtime(), EventKind::job_end, r.job.id);
  log("start job=" + std::to_string(r.job.id) + " archive_node=" + std::to_string(slot));
}

std::optional<NodeSet> Simulator::select_for(const JobRecord& r, const NodeMask& available) const {
  const std::size_t pi = partition_index(r.job.partition);
  const Partition& p = cfg_.scheduler.partitions[pi];
  const std::uint32_t n = r.job.nodes_requested;
  NodeMask avail = available & eligible_[pi];
  if (avail.count() < n) return std::nullopt;
  if (dedicated_[pi].none()) return select_from(topo_, avail, n, cfg_.scheduler.placement, p.wing_restriction);

  // Dedicated nodes go first, then anything else the partition may use.
  NodeSet chosen;
  const NodeMask own = avail & dedicated_[pi];
  for (auto i = own.find_first(); i != NodeMask::npos && chosen.size() < n; i = own.find_next(i))
    chosen.push_back(NodeId{static_cast<std::uint32_t>(i)});
  if (chosen.size() < n) {
    auto rest = select_from(topo_, avail - dedicated_[pi], n - static_cast<std::uint32_t>(chosen.size()),
                            cfg_.scheduler.placement, p.wing_restriction);
    if (!rest) return std::nullopt;
    chosen.insert(chosen.end(), rest->begin(), rest->end());
    std::sort(chosen.begin(), chosen.end());
  }
  return chosen;
}

std::optional<Simulator::Reservation> Simulator::plan_reservation(const JobRecord& r) const {
  std::vector<const JobRecord*> ending;
  for (JobId id : running_) {
    const JobRecord& o = record(id);
    if (o.pool == ResourcePool::compute) ending.push_back(&o);
  }
  // Walltime is all the scheduler knows about when nodes come back.
  auto expected_end = [](const JobRecord* o) { return *o->start_time + o->job.walltime_requested; };
  std::sort(ending.begin(), ending.end(), [&](const JobRecord* a, const JobRecord* b) {
    const auto ea = expected_end(a), eb = expected_end(b);
    return ea != eb ? ea < eb : a->job.id < b->job.id;
  });
  NodeMask projected = topo_.free_mask();
  for (const JobRecord* o : ending) {
    for (NodeId n : o->allocated_nodes) projected.set(index(n));
    if (auto sel = select_for(r, projected))
      return Reservation{std::max(now_, expected_end(o)), to_mask(*sel, topo_.node_count())};
  }
  return std::nullopt;
}

double Simulator::job_priority(JobId id, Seconds now) {
  const JobRecord& r = record(id);
  const auto& sc = cfg_.scheduler;
  return compute_priority(r.job, now, ledger_, sc.weights, sc.partitions, sc.qos.at(r.qos));
}

void Simulator::consider(JobId id, Seconds now, PassState& st) {
  const auto& sc = cfg_.scheduler;
  JobRecord& r = rec(id);
  const std::size_t pi = partition_index(r.job.partition);
  const Partition& p = sc.partitions[pi];

  if (p.max_jobs_per_user) {
    auto it = running_per_user_partition_.find({r.job.user, p.name});
    if (it != running_per_user_partition_.end() && it->second >= *p.max_jobs_per_user) return;
  }
  if (p.pool == ResourcePool::archive) {
    start_archive_job(r);
    st.started.emplace_back(r.job.id, r.allocated_nodes);
    return;
  }
  if (r.job.nodes_requested > capacity_[pi]) {
    r.phase = JobPhase::rejected;
    r.reason = rule::kNotEnoughNodes;
    --active_per_user_qos_[{r.job.user, r.qos}];
    ++st.rejected;
    log("reject job=" + std::to_string(r.job.id) + " rule=" + r.reason);
    return;
  }
  if (st.blocked || (st.reservation && topo_.free_count() == 0)) return;

  std::optional<NodeSet> sel;
  if (r.job.nodes_requested > topo_.free_count()) {
    // cannot fit anywhere right now
  } else if (!st.reservation) {
    sel = select_for(r, topo_.free_mask());
  } else {
    NodeMask avail = topo_.free_mask();
    if (now + r.job.walltime_requested > st.reservation->start) avail -= st.reservation->nodes;
    sel = select_for(r, avail);
  }
  if (sel) {
    start_job(r, std::move(*sel));
    st.started.emplace_back(r.job.id, r.allocated_nodes);
    return;
  }
  if (st.reservation) return;
  if (sc.backfill == BackfillMode::none) {
    st.blocked = true;
    return;
  }
  st.reservation = plan_reservation(r);
  if (st.reservation)
    log("reserve job=" + std::to_string(r.job.id) + " at=" + std::to_string(st.reservation->start));
  else
    st.blocked = true;
}

std::vector<std::pair<JobId, NodeSet>> Simulator::scheduler_pass(Seconds now) {
  now_ = now;
  ++passes_;
  const auto& sc = cfg_.scheduler;

  struct Candidate {
    double priority;
    Seconds submit;
    JobId id;
    bool off_compute;  // archive job or one that can never fit: acted on regardless of free nodes
  };
  std::vector<Candidate> order;
  order.reserve(pending_.size());
  std::map<std::string, double> fairshare;  // usage does not change during a pass
  for (JobId id : pending_) {
    const JobRecord& r = record(id);
    const std::size_t pi = partition_index(r.job.partition);
    const Partition& p = sc.partitions[pi];
    auto fs = fairshare.find(r.job.group);
    if (fs == fairshare.end()) fs = fairshare.emplace(r.job.group, ledger_.fairshare_factor(r.job.group, now)).first;
    const auto f = priority_factors(r.job, now, fs->second, sc.weights, p, sc.qos.at(r.qos));
    const bool off = p.pool == ResourcePool::archive || r.job.nodes_requested > capacity_[pi];
    order.push_back({weighted_priority(f, sc.weights), r.job.submit_time, id, off});
  }
  const auto before = [](const Candidate& a, const Candidate& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (a.submit != b.submit) return a.submit < b.submit;
    return a.id < b.id;
  };
  // Max-heap on `before`: candidates come out in priority order, and only as
  // many are popped as the pass can still act on.
  const auto heap_less = [&](const Candidate& a, const Candidate& b) { return before(b, a); };
  std::make_heap(order.begin(), order.end(), heap_less);
  auto heap_end = order.end();

  PassState st;

  // Once compute nodes are out of reach for the rest of the queue, only archive
  // starts and capacity rejections remain; handle those in priority order.
  std::vector<Candidate> tail;
  while (order.begin() != heap_end) {
    std::pop_heap(order.begin(), heap_end, heap_less);
    --heap_end;
    Candidate c = *heap_end;
    if (st.blocked || (st.reservation && topo_.free_count() == 0)) {
      tail.assign(order.begin(), heap_end + 1);
      std::erase_if(tail, [](const Candidate& t) { return !t.off_compute; });
      std::sort(tail.begin(), tail.end(), before);
      break;
    }
    consider(c.id, now, st);
  }
  for (const Candidate& c : tail) consider(c.id, now, st);

  std::erase_if(pending_, [&](JobId id) { return record(id).phase != JobPhase::pending; });
  log("pass pending=" + std::to_string(pending_.size()) + " started=" + std::to_string(st.started.size()) +
      (st.rejected ? " rejected=" + std::to_string(st.rejected) : ""));
  return std::move(st.started);
}

SimulationResult run_simulation(const std::vector<Job>& workload, const Config& cfg) {
  Simulator sim(cfg);
  for (const Job& j : workload) sim.submit(j);
  return sim.run();
}

void write_job_records(std::ostream& out, const SimulationResult& result) {
  out << "# total_nodes=" << result.total_nodes << " cores_per_node=" << result.cores_per_node
      << " start=" << result.start_time << " end=" << result.end_time << "\n";
  out << "id,user,group,partition,qos,nodes,walltime,runtime,tasks_per_node,submit,start,end,phase,"
         "pool,default_user,wing_span,blocking,max_hops,allocated,reason\n";
  for (const auto& r : result.jobs) {
    std::string alloc = format_node_ranges(r.allocated_nodes);
    std::replace(alloc.begin(), alloc.end(), ',', ';');
    out << r.job.id << ',' << r.job.user << ',' << r.job.group << ',' << r.job.partition << ',' << r.qos
        << ',' << r.job.nodes_requested << ',' << r.job.walltime_requested << ',' << r.job.actual_runtime
        << ',' << r.job.tasks_per_node << ',' << r.job.submit_time << ','
        << (r.start_time ? std::to_string(*r.start_time) : "") << ','
        << (r.end_time ? std::to_string(*r.end_time) : "") << ',' << to_string(r.phase) << ','
        << (r.pool == ResourcePool::compute ? "compute" : "archive") << ',' << (r.default_user ? 1 : 0)
        << ',' << r.wing_span << ',' << r.blocking_factor << ',' << r.max_hops << ',' << alloc << ','
        << r.reason << "\n";
  }
}

namespace {

template <class T>
T field_number(const std::string& s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("job records line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

SimulationResult read_job_records(std::istream& in) {
  SimulationResult out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      for (std::string kv; meta >> kv;) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "total_nodes") out.total_nodes = field_number<std::uint32_t>(val, lineno);
        if (key == "cores_per_node") out.cores_per_node = field_number<std::uint32_t>(val, lineno);
        if (key == "start") out.start_time = field_number<Seconds>(val, lineno);
        if (key == "end") out.end_time = field_number<Seconds>(val, lineno);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 20) throw std::runtime_error("job records line " + std::to_string(lineno) + ": expected 20 fields");
    JobRecord r;
    r.job.id = field_number<JobId>(f[0], lineno);
    r.job.user = f[1];
    r.job.group = f[2];
    r.job.partition = f[3];
    r.qos = f[4];
    r.job.nodes_requested = field_number<std::uint32_t>(f[5], lineno);
    r.job.walltime_requested = field_number<Seconds>(f[6], lineno);
    r.job.actual_runtime = field_number<Seconds>(f[7], lineno);
    r.job.tasks_per_node = field_number<std::uint32_t>(f[8], lineno);
    r.job.submit_time = field_number<Seconds>(f[9], lineno);
    if (!f[10].empty()) r.start_time = field_number<Seconds>(f[10], lineno);
    if (!f[11].empty()) r.end_time = field_number<Seconds>(f[11], lineno);
    if (!parse_job_phase(f[12], r.phase)) throw std::runtime_error("job records: bad phase '" + f[12] + "'");
    r.pool = f[13] == "archive" ? ResourcePool::archive : ResourcePool::compute;
    r.default_user = f[14] == "1";
    r.wing_span = field_number<std::uint32_t>(f[15], lineno);
    r.blocking_factor = field_number<double>(f[16], lineno);
    r.max_hops = field_number<int>(f[17], lineno);
    std::string alloc = f[18];
    std::replace(alloc.begin(), alloc.end(), ';', ',');
    r.allocated_nodes = parse_node_ranges(alloc);
    r.reason = f[19];
    out.jobs.push_back(std::move(r));
  }
  std::sort(out.jobs.begin(), out.jobs.end(),
            [](const JobRecord& a, const JobRecord& b) { return a.job.id < b.job.id; });
  return out;
}

void write_event_log(std::ostream& out, const SimulationResult& result) {
  for (const auto& line : result.event_log) out << line << "\n";
}

}  // namespace nsim
