#include "nsim/fspolicy.hpp"

#include <cctype>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nsim {

FsConfig default_fs_config() {
  FsConfig cfg;
  cfg.file_systems = {
      {FileSystem::home, 100 * kGiB, QuotaScope::user, kMiB, std::nullopt, true, true,
       ComputeAccess::ro},
      {FileSystem::scratch, 25 * kTiB, QuotaScope::user, 16 * kMiB, 60 * kDay, false, true,
       ComputeAccess::rw},
      {FileSystem::project, std::nullopt, QuotaScope::group, 16 * kMiB, std::nullopt, true, true,
       ComputeAccess::rw},
      {FileSystem::bb, 10 * kTiB, QuotaScope::user, kMiB, 48 * kHour, false, true,
       ComputeAccess::rw},
      {FileSystem::hpss, std::nullopt, QuotaScope::group, 0, std::nullopt, true, false,
       ComputeAccess::absent},
  };
  return cfg;
}

const FileSystemSpec& FsConfig::spec(FileSystem fs) const {
  for (const auto& s : file_systems)
    if (s.fs == fs) return s;
  throw std::invalid_argument("no file system spec for " + std::string(to_string(fs)));
}

std::vector<std::string> FsConfig::validate() const {
  std::vector<std::string> e;
  for (FileSystem fs : {FileSystem::home, FileSystem::scratch, FileSystem::project, FileSystem::bb,
                        FileSystem::hpss}) {
    std::size_t n = 0;
    for (const auto& s : file_systems) n += s.fs == fs;
    if (n != 1) e.push_back("fs: expected exactly one spec for " + std::string(to_string(fs)));
  }
  for (const auto& s : file_systems) {
    const std::string name(to_string(s.fs));
    if (s.purge_age && *s.purge_age <= 0) e.push_back("fs." + name + ": purge_age must be positive");
    if (s.purge_age && s.fs != FileSystem::scratch && s.fs != FileSystem::bb)
      e.push_back("fs." + name + ": only scratch and bb are purged");
    if (s.fs == FileSystem::home && s.on_compute != ComputeAccess::ro)
      e.push_back("fs.home: must be read-only on compute nodes");
    if (s.fs == FileSystem::hpss && s.on_compute != ComputeAccess::absent)
      e.push_back("fs.hpss: must not be mounted on compute nodes");
  }
  if (bb_capacity == 0) e.emplace_back("fs: bb capacity must be positive");
  if (purge_scan_interval <= 0) e.emplace_back("fs: purge scan interval must be positive");
  return e;
}

std::string layout_path(FileSystem fs, const std::string& group, const std::string& user) {
  if (group.empty()) throw std::invalid_argument("layout_path: empty group");
  if (user.empty()) throw std::invalid_argument("layout_path: empty user");
  const char letter = static_cast<char>(std::tolower(static_cast<unsigned char>(group.front())));
  std::string path = "/";
  path += to_string(fs);
  path += '/';
  path += letter;
  path += '/' + group + '/' + user;
  return path;
}

std::uint64_t accounted_bytes(const FileSystemSpec& spec, std::uint64_t bytes) {
  if (spec.block_size == 0 || bytes == 0) return bytes;
  return (bytes + spec.block_size - 1) / spec.block_size * spec.block_size;
}

QuotaVerdict check_quota(const FileSystemSpec& spec, std::int64_t current_usage, std::int64_t delta,
                         std::optional<std::uint64_t> quota) {
  QuotaVerdict v;
  const std::uint64_t magnitude = delta < 0 ? 0 - static_cast<std::uint64_t>(delta)
                                            : static_cast<std::uint64_t>(delta);
  const auto charged = static_cast<std::int64_t>(accounted_bytes(spec, magnitude));
  v.charged_delta = delta < 0 ? -charged : charged;
  v.resulting_usage = std::max<std::int64_t>(0, current_usage + v.charged_delta);
  const auto limit = quota ? quota : spec.quota_bytes;
  if (limit && v.charged_delta > 0 &&
      static_cast<std::uint64_t>(v.resulting_usage) > *limit) {
    v.accepted = false;
    std::ostringstream os;
    os << "quota exceeded on " << to_string(spec.fs) << ": " << v.resulting_usage << " > " << *limit
       << " bytes";
    v.reason = os.str();
    v.resulting_usage = current_usage;
  }
  return v;
}

bool access(const FileSystemSpec& spec, AccessContext context, AccessMode mode) {
  if (context == AccessContext::login) return spec.on_login;
  switch (spec.on_compute) {
    case ComputeAccess::rw: return true;
    case ComputeAccess::ro: return mode == AccessMode::read;
    case ComputeAccess::absent: return false;
  }
  return false;
}

std::vector<FileRecord> purge_scan(const std::vector<FileRecord>& files, Seconds now,
                                   const FsConfig& cfg) {
  std::vector<FileRecord> out;
  for (const auto& f : files) {
    const auto& spec = cfg.spec(f.fs);
    if (spec.purge_age && now - f.atime > *spec.purge_age) out.push_back(f);
  }
  return out;
}

BurstBuffer::BurstBuffer(std::uint64_t capacity, std::uint64_t per_user_quota)
    : capacity_(capacity), per_user_quota_(per_user_quota) {}

std::string BurstBuffer::on_job_start(JobId job, const std::string& user) {
  if (jobs_.count(job)) throw std::logic_error("burst buffer: job directory exists already");
  std::string path = "/bb/jobs/" + std::to_string(job);
  jobs_.emplace(job, JobDir{user, path, 0});
  return path;
}

std::uint64_t BurstBuffer::on_job_end(JobId job) {
  auto it = jobs_.find(job);
  if (it == jobs_.end()) return 0;
  const std::uint64_t freed = it->second.bytes;
  used_ -= freed;
  jobs_.erase(it);
  return freed;
}

std::uint64_t BurstBuffer::user_usage(const std::string& user) const {
  std::uint64_t total = persistent_usage(user);
  for (const auto& [id, dir] : jobs_)
    if (dir.user == user) total += dir.bytes;
  return total;
}

bool BurstBuffer::fits(const std::string& user, std::uint64_t bytes) const {
  return used_ + bytes <= capacity_ && user_usage(user) + bytes <= per_user_quota_;
}

bool BurstBuffer::write_job(JobId job, std::uint64_t bytes) {
  auto it = jobs_.find(job);
  if (it == jobs_.end()) throw std::logic_error("burst buffer: job has no directory");
  if (!fits(it->second.user, bytes)) return false;
  it->second.bytes += bytes;
  used_ += bytes;
  return true;
}

bool BurstBuffer::write_persistent(const std::string& user, std::uint64_t bytes) {
  if (!fits(user, bytes)) return false;
  persistent_[user] += bytes;
  used_ += bytes;
  return true;
}

void BurstBuffer::remove_persistent(const std::string& user, std::uint64_t bytes) {
  auto it = persistent_.find(user);
  if (it == persistent_.end()) return;
  const auto n = std::min(bytes, it->second);
  it->second -= n;
  used_ -= n;
  if (it->second == 0) persistent_.erase(it);
}

std::optional<std::string> BurstBuffer::job_dir(JobId job) const {
  auto it = jobs_.find(job);
  if (it == jobs_.end()) return std::nullopt;
  return it->second.path;
}

std::uint64_t BurstBuffer::job_dir_usage(JobId job) const {
  auto it = jobs_.find(job);
  return it == jobs_.end() ? 0 : it->second.bytes;
}

std::uint64_t BurstBuffer::persistent_usage(const std::string& user) const {
  auto it = persistent_.find(user);
  return it == persistent_.end() ? 0 : it->second;
}

std::vector<UsageRow> usage_report(const std::vector<FileRecord>& files, const FsConfig& cfg) {
  std::map<std::pair<FileSystem, std::string>, UsageRow> rows;
  for (const auto& f : files) {
    const auto& spec = cfg.spec(f.fs);
    const std::string& principal = spec.scope == QuotaScope::user ? f.user : f.group;
    auto& row = rows[{f.fs, principal}];
    row.fs = f.fs;
    row.principal = principal;
    row.used += accounted_bytes(spec, f.size);
    ++row.files;
    if (spec.quota_bytes) {
      row.quota = spec.quota_bytes;
    } else if (auto it = cfg.group_quotas.find(f.group); it != cfg.group_quotas.end()) {
      row.quota = it->second;
    }
  }
  std::vector<UsageRow> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) out.push_back(std::move(row));
  return out;
}

std::string format_bytes(std::uint64_t bytes) {
  static constexpr const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB", "PiB"};
  double v = static_cast<double>(bytes);
  std::size_t u = 0;
  while (v >= 1024.0 && u + 1 < std::size(units)) {
    v /= 1024.0;
    ++u;
  }
  std::ostringstream os;
  if (u == 0)
    os << bytes << " B";
  else
    os << std::fixed << std::setprecision(2) << v << ' ' << units[u];
  return os.str();
}

}  // namespace nsim
