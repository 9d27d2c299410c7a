#include "nsim/workload.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nsim {

std::vector<std::string> job_violations(const Job& job) {
  std::vector<std::string> v;
  if (job.nodes_requested < 1) v.emplace_back("job must request at least one node");
  if (job.walltime_requested <= 0) v.emplace_back("walltime must be positive");
  if (job.tasks_per_node < 1 || job.tasks_per_node > 80)
    v.emplace_back("tasks_per_node must be between 1 and 80");
  if (job.actual_runtime < 0) v.emplace_back("runtime must be nonnegative");
  if (job.actual_runtime > job.walltime_requested) v.emplace_back("runtime exceeds walltime");
  if (job.submit_time < 0) v.emplace_back("submit time must be nonnegative");
  if (job.user.empty()) v.emplace_back("missing user");
  if (job.group.empty()) v.emplace_back("missing group");
  if (job.partition.empty()) v.emplace_back("missing partition");
  return v;
}

namespace {

constexpr std::size_t kSwfColumns = 18;

enum Col : std::size_t {
  kJobNumber = 0,
  kSubmit = 1,
  kRunTime = 3,
  kAllocatedProcs = 4,
  kRequestedProcs = 7,
  kRequestedTime = 8,
  kUser = 11,
  kGroup = 12,
  kQueue = 14,
  kPartition = 15,
  kTasksPerNode = 18,
  kCwdFs = 19,
  kNeedsNetwork = 20,
};

std::optional<double> number(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::int64_t as_int(double v) { return static_cast<std::int64_t>(std::llround(v)); }

/// Names stay as written; SWF numeric ids get a prefix, -1 means "unset".
std::string name_field(const std::string& raw, const char* prefix, const std::string& unset) {
  if (auto v = number(raw)) {
    const auto id = as_int(*v);
    return id < 0 ? unset : prefix + std::to_string(id);
  }
  return raw;
}

}  // namespace

TraceParseResult parse_trace(std::istream& in) {
  TraceParseResult result;
  std::set<JobId> seen;
  std::string line;
  std::size_t lineno = 0;

  auto reject = [&](const std::string& msg) {
    result.diagnostics.push_back({lineno, msg});
    ++result.skipped;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find(';'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string tok; fields >> tok;) cols.push_back(tok);
    if (cols.empty()) continue;
    if (cols.size() < kSwfColumns) {
      reject("expected at least 18 columns, found " + std::to_string(cols.size()));
      continue;
    }

    auto num = [&](std::size_t col) -> std::optional<std::int64_t> {
      if (auto v = number(cols[col])) return as_int(*v);
      return std::nullopt;
    };

    Job job;
    const auto id = num(kJobNumber);
    const auto submit = num(kSubmit);
    const auto runtime = num(kRunTime);
    auto nodes = num(kRequestedProcs);
    const auto walltime = num(kRequestedTime);
    if (!id || !submit || !runtime || !nodes || !walltime) {
      reject("non-numeric value in a numeric column");
      continue;
    }
    if (*nodes < 0) nodes = num(kAllocatedProcs);
    if (!nodes) {
      reject("non-numeric node count");
      continue;
    }

    job.id = *id;
    job.submit_time = *submit;
    job.walltime_requested = *walltime;
    job.actual_runtime = *runtime < 0 ? *walltime : std::min(*runtime, *walltime);
    if (*nodes < 1) {
      reject("job must request at least one node (got " + std::to_string(*nodes) + ")");
      continue;
    }
    job.nodes_requested = static_cast<std::uint32_t>(*nodes);
    job.user = name_field(cols[kUser], "u", "unknown");
    job.group = name_field(cols[kGroup], "g", "unknown");
    job.qos = name_field(cols[kQueue], "q", "");
    job.partition = name_field(cols[kPartition], "p", "compute");

    if (cols.size() > kTasksPerNode) {
      auto tpn = num(kTasksPerNode);
      if (!tpn) {
        reject("non-numeric tasks_per_node");
        continue;
      }
      job.tasks_per_node = *tpn < 0 ? 40 : static_cast<std::uint32_t>(std::min<std::int64_t>(*tpn, 1'000'000));
    }
    if (cols.size() > kCwdFs) {
      FileSystem fs{};
      if (cols[kCwdFs] != "-1" && parse_file_system(cols[kCwdFs], fs)) job.submit_cwd_fs = fs;
    }
    if (cols.size() > kNeedsNetwork) job.needs_network = cols[kNeedsNetwork] == "1";

    if (auto v = job_violations(job); !v.empty()) {
      reject(v.front());
      continue;
    }
    if (!seen.insert(job.id).second) {
      reject("duplicate job id " + std::to_string(job.id));
      continue;
    }
    result.jobs.push_back(std::move(job));
  }

  std::stable_sort(result.jobs.begin(), result.jobs.end(), [](const Job& a, const Job& b) {
    return a.submit_time != b.submit_time ? a.submit_time < b.submit_time : a.id < b.id;
  });
  return result;
}

TraceParseResult parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace file " + path.string());
  return parse_trace(in);
}

void emit_trace(std::ostream& out, const std::vector<Job>& jobs) {
  out << "; SWF trace with extension columns 19=tasks_per_node 20=submit_cwd_fs 21=needs_network\n";
  for (const Job& j : jobs) {
    // 1 id, 2 submit, 3 wait, 4 runtime, 5 alloc, 6 cpu, 7 mem, 8 req nodes,
    // 9 req time, 10 req mem, 11 status, 12 user, 13 group, 14 exe, 15 queue,
    // 16 partition, 17 prev job, 18 think time
    out << j.id << ' ' << j.submit_time << " -1 " << j.actual_runtime << ' ' << j.nodes_requested
        << " -1 -1 " << j.nodes_requested << ' ' << j.walltime_requested << " -1 1 " << j.user
        << ' ' << j.group << " -1 " << (j.qos.empty() ? std::string("-1") : j.qos) << ' '
        << j.partition << " -1 -1 " << j.tasks_per_node << ' ' << to_string(j.submit_cwd_fs) << ' '
        << (j.needs_network ? 1 : 0) << '\n';
  }
}

std::vector<std::string> WorkloadSpec::validate() const {
  std::vector<std::string> e;
  if (!(arrival_rate_per_hour >= 0) || !std::isfinite(arrival_rate_per_hour))
    e.emplace_back("workload: arrival rate must be nonnegative");
  if (sizes.empty()) e.emplace_back("workload: no size classes");
  for (const auto& s : sizes) {
    if (s.nodes < 1) e.emplace_back("workload: size class with zero nodes");
    if (!(s.weight >= 0)) e.emplace_back("workload: negative size weight");
  }
  if (walltimes.empty()) e.emplace_back("workload: no walltime classes");
  for (const auto& w : walltimes) {
    if (w.walltime <= 0) e.emplace_back("workload: walltime class must be positive");
    if (!(w.weight >= 0)) e.emplace_back("workload: negative walltime weight");
  }
  if (!(runtime_log_sigma >= 0)) e.emplace_back("workload: runtime sigma must be nonnegative");
  if (users < 1) e.emplace_back("workload: need at least one user");
  if (groups.empty()) e.emplace_back("workload: need at least one group");
  for (double f : {debug_fraction, hyperthread_fraction, home_submit_fraction})
    if (!(f >= 0 && f <= 1)) e.emplace_back("workload: fractions must lie in [0,1]");
  return e;
}

std::vector<Job> generate_workload(const WorkloadSpec& spec, Seconds horizon) {
  if (horizon <= 0) throw std::invalid_argument("generate_workload: horizon must be positive");
  if (auto e = spec.validate(); !e.empty()) throw std::invalid_argument(e.front());
  std::vector<Job> jobs;
  if (spec.arrival_rate_per_hour == 0) return jobs;

  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.arrival_rate_per_hour / static_cast<double>(kHour));
  std::vector<double> size_w, wall_w;
  for (const auto& s : spec.sizes) size_w.push_back(s.weight);
  for (const auto& w : spec.walltimes) wall_w.push_back(w.weight);
  std::discrete_distribution<std::size_t> size_pick(size_w.begin(), size_w.end());
  std::discrete_distribution<std::size_t> wall_pick(wall_w.begin(), wall_w.end());
  std::lognormal_distribution<double> runtime(spec.runtime_log_mean, spec.runtime_log_sigma);
  std::uniform_int_distribution<std::uint32_t> user_pick(0, spec.users - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const double end = static_cast<double>(spec.start_time + horizon);
  double t = static_cast<double>(spec.start_time);
  JobId id = spec.first_id;
  while (true) {
    t += gap(rng);
    if (t >= end) break;
    Job job;
    job.id = id++;
    job.submit_time = static_cast<Seconds>(std::floor(t));
    const std::uint32_t u = user_pick(rng);
    std::ostringstream name;
    name << "user" << std::setw(3) << std::setfill('0') << u;
    job.user = name.str();
    job.group = spec.groups[u % spec.groups.size()];
    job.partition = spec.partition;
    job.nodes_requested = spec.sizes[size_pick(rng)].nodes;
    job.walltime_requested = spec.walltimes[wall_pick(rng)].walltime;
    const double r = std::round(runtime(rng));
    job.actual_runtime = std::clamp<Seconds>(static_cast<Seconds>(std::min(r, 1e12)), 1,
                                             job.walltime_requested);
    // Independent draws keep the stream layout fixed whatever the fractions are.
    const double debug_draw = coin(rng), ht_draw = coin(rng), home_draw = coin(rng);
    if (debug_draw < spec.debug_fraction) {
      // Debug sessions are short and small.
      job.partition = "debug";
      job.nodes_requested = std::min<std::uint32_t>(job.nodes_requested, 4);
      job.walltime_requested = std::min(job.walltime_requested, kHour);
      job.actual_runtime = std::min(job.actual_runtime, job.walltime_requested);
    }
    job.tasks_per_node = ht_draw < spec.hyperthread_fraction ? 80 : 40;
    job.submit_cwd_fs = home_draw < spec.home_submit_fraction ? FileSystem::home : FileSystem::scratch;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

}  // namespace nsim
