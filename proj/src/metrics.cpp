#include "nsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace nsim {

namespace {

/// Interval during which the job held its nodes, if it ever started.
std::optional<std::pair<Seconds, Seconds>> held(const JobRecord& r, Seconds horizon_end) {
  if (!r.start_time || r.pool != ResourcePool::compute) return std::nullopt;
  return std::pair{*r.start_time, r.end_time.value_or(horizon_end)};
}

Seconds overlap(std::pair<Seconds, Seconds> a, Seconds t0, Seconds t1) {
  return std::max<Seconds>(0, std::min(a.second, t1) - std::max(a.first, t0));
}

}  // namespace

double utilization(const SimulationResult& result, Seconds t0, Seconds t1) {
  if (t0 >= t1) throw std::invalid_argument("utilization: empty window");
  if (result.total_nodes == 0) throw std::invalid_argument("utilization: result has no nodes");
  long double busy = 0;
  for (const auto& r : result.jobs) {
    if (auto h = held(r, result.end_time))
      busy += static_cast<long double>(r.allocated_nodes.size()) * overlap(*h, t0, t1);
  }
  return static_cast<double>(busy / (static_cast<long double>(result.total_nodes) * (t1 - t0)));
}

std::vector<UtilizationBucket> utilization_series(const SimulationResult& result, Seconds t0, Seconds t1,
                                                  Seconds bucket) {
  if (bucket <= 0) throw std::invalid_argument("utilization_series: bucket must be positive");
  std::vector<UtilizationBucket> out;
  for (Seconds s = t0; s < t1; s += bucket) {
    UtilizationBucket b;
    b.start = s;
    b.end = std::min(t1, s + bucket);
    b.utilization = utilization(result, b.start, b.end);
    b.cpu_days = b.utilization * result.total_nodes * result.cores_per_node *
                 static_cast<double>(b.end - b.start) / static_cast<double>(kDay);
    out.push_back(b);
  }
  return out;
}

QsumReport qsum(const SimulationResult& result, Seconds now) {
  std::map<std::string, QsumRow> rows;
  std::map<std::string, std::pair<double, std::size_t>> walltimes;
  QsumReport rep;
  rep.totals.user = "TOTAL";
  for (const auto& r : result.jobs) {
    if (r.job.submit_time > now || r.phase == JobPhase::rejected || r.phase == JobPhase::cancelled) continue;
    const bool running = r.start_time && *r.start_time <= now && (!r.end_time || now < *r.end_time);
    const bool pending = !r.start_time || *r.start_time > now;
    if (!running && !pending) continue;
    QsumRow& row = rows[r.job.user];
    row.user = r.job.user;
    row.default_user = r.default_user;
    const std::uint64_t cores = r.pool == ResourcePool::compute
                                    ? std::uint64_t{r.job.nodes_requested} * result.cores_per_node
                                    : 0;
    if (running) {
      ++row.running_jobs;
      row.running_cores += cores;
    } else {
      ++row.pending_jobs;
      row.pending_cores += cores;
    }
    auto& [sum, n] = walltimes[r.job.user];
    sum += static_cast<double>(r.job.walltime_requested);
    ++n;
  }
  double all_sum = 0;
  std::size_t all_n = 0;
  std::uint64_t default_cores = 0;
  for (auto& [user, row] : rows) {
    const auto [sum, n] = walltimes[user];
    row.mean_walltime = sum / static_cast<double>(n);
    all_sum += sum;
    all_n += n;
    rep.totals.running_jobs += row.running_jobs;
    rep.totals.running_cores += row.running_cores;
    rep.totals.pending_jobs += row.pending_jobs;
    rep.totals.pending_cores += row.pending_cores;
    if (row.default_user) default_cores += row.running_cores;
    rep.rows.push_back(row);
  }
  rep.totals.mean_walltime = all_n ? all_sum / static_cast<double>(all_n) : 0.0;
  const double system_cores = static_cast<double>(result.total_nodes) * result.cores_per_node;
  rep.default_user_fraction = system_cores > 0 ? static_cast<double>(default_cores) / system_cores : 0.0;
  return rep;
}

bool JobFilter::matches(const JobRecord& r) const {
  return (!partition || r.job.partition == *partition) && (!user || r.job.user == *user) &&
         (!group || r.job.group == *group);
}

WaitStats wait_time_stats(const SimulationResult& result, const JobFilter& filter) {
  std::vector<double> waits;
  for (const auto& r : result.jobs)
    if (r.start_time && filter.matches(r)) waits.push_back(static_cast<double>(*r.start_time - r.job.submit_time));
  WaitStats s;
  s.count = waits.size();
  if (waits.empty()) return s;
  std::sort(waits.begin(), waits.end());
  double sum = 0;
  for (double w : waits) sum += w;
  s.mean = sum / static_cast<double>(waits.size());
  const std::size_t n = waits.size();
  s.median = n % 2 ? waits[n / 2] : (waits[n / 2 - 1] + waits[n / 2]) / 2.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = waits[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

std::vector<LocalityRow> locality_report(const SimulationResult& result) {
  std::vector<LocalityRow> out;
  for (const auto& r : result.jobs) {
    if (!r.start_time || r.pool != ResourcePool::compute) continue;
    out.push_back({r.job.id, r.job.partition, static_cast<std::uint32_t>(r.allocated_nodes.size()),
                   r.wing_span, r.blocking_factor, r.max_hops});
  }
  return out;
}

std::map<std::string, std::int64_t> delivered_node_seconds(const SimulationResult& result, Seconds t0,
                                                           Seconds t1) {
  std::map<std::string, std::int64_t> out;
  for (const auto& r : result.jobs)
    if (auto h = held(r, result.end_time))
      out[r.job.group] += static_cast<std::int64_t>(r.allocated_nodes.size()) * overlap(*h, t0, t1);
  return out;
}

void write_utilization_csv(std::ostream& out, const std::vector<UtilizationBucket>& buckets) {
  out << "start,end,utilization,cpu_days\n";
  for (const auto& b : buckets)
    out << b.start << ',' << b.end << ',' << std::fixed << std::setprecision(6) << b.utilization << ','
        << std::setprecision(3) << b.cpu_days << std::defaultfloat << "\n";
}

void write_qsum(std::ostream& out, const QsumReport& report) {
  out << "user,running_jobs,running_cores,pending_jobs,pending_cores,mean_walltime_h,default_user\n";
  auto row = [&](const QsumRow& r) {
    out << r.user << ',' << r.running_jobs << ',' << r.running_cores << ',' << r.pending_jobs << ','
        << r.pending_cores << ',' << std::fixed << std::setprecision(2) << r.mean_walltime / kHour
        << std::defaultfloat << ',' << (r.default_user ? 1 : 0) << "\n";
  };
  for (const auto& r : report.rows) row(r);
  row(report.totals);
  out << "# default_user_fraction=" << std::fixed << std::setprecision(4) << report.default_user_fraction
      << std::defaultfloat << "\n";
}

void write_wait_stats(std::ostream& out, const std::string& label, const WaitStats& s) {
  out << label << ',' << s.count << ',' << std::fixed << std::setprecision(1) << s.mean << ',' << s.median
      << ',' << s.p95 << std::defaultfloat << "\n";
}

void write_locality_csv(std::ostream& out, const std::vector<LocalityRow>& rows) {
  out << "id,partition,nodes,wing_span,blocking,max_hops\n";
  for (const auto& r : rows)
    out << r.id << ',' << r.partition << ',' << r.nodes << ',' << r.wing_span << ',' << r.blocking_factor
        << ',' << r.max_hops << "\n";
}

}  // namespace nsim
