#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsim/types.hpp"

namespace nsim {

inline constexpr std::uint64_t kMiB = 1ull << 20;
inline constexpr std::uint64_t kGiB = 1ull << 30;
inline constexpr std::uint64_t kTiB = 1ull << 40;

enum class ComputeAccess { rw, ro, absent };
enum class QuotaScope { user, group };
enum class AccessContext { login, compute };
enum class AccessMode { read, write };

struct FileSystemSpec {
  FileSystem fs = FileSystem::scratch;
  /// Unset means "by group allocation" (looked up per group).
  std::optional<std::uint64_t> quota_bytes;
  QuotaScope scope = QuotaScope::user;
  std::uint64_t block_size = kMiB;  // 0: byte-granular accounting
  std::optional<Seconds> purge_age;
  bool backed_up = false;
  bool on_login = true;
  ComputeAccess on_compute = ComputeAccess::rw;
};

struct FsConfig {
  std::vector<FileSystemSpec> file_systems;
  std::uint64_t bb_capacity = 256 * kTiB;
  Seconds purge_scan_interval = kDay;
  /// Group quotas for the allocation-based file systems (project, hpss).
  std::map<std::string, std::uint64_t> group_quotas;

  const FileSystemSpec& spec(FileSystem fs) const;
  std::vector<std::string> validate() const;
};

/// home, scratch, project, bb and hpss with their stock quotas, block sizes
/// and purge rules.
FsConfig default_fs_config();

/// `/<fs>/<first letter of group>/<group>/<user>`. Throws on empty names.
std::string layout_path(FileSystem fs, const std::string& group, const std::string& user);

/// Bytes charged for a file of `bytes`: rounded up to whole blocks.
std::uint64_t accounted_bytes(const FileSystemSpec& spec, std::uint64_t bytes);

struct QuotaVerdict {
  bool accepted = true;
  std::int64_t charged_delta = 0;  // block-rounded change
  std::int64_t resulting_usage = 0;
  std::string reason;
};

/// Hard quota check for changing a principal's usage by `delta` bytes.
/// `current_usage` is already block-accounted. `quota` overrides the spec's
/// quota (used for group-allocated file systems).
QuotaVerdict check_quota(const FileSystemSpec& spec, std::int64_t current_usage, std::int64_t delta,
                         std::optional<std::uint64_t> quota = std::nullopt);

bool access(const FileSystemSpec& spec, AccessContext context, AccessMode mode);

struct FileRecord {
  std::string path;
  std::string user;
  std::string group;
  std::uint64_t size = 0;
  Seconds atime = 0;
  FileSystem fs = FileSystem::scratch;
};

/// Files on purge-managed file systems not accessed for longer than the
/// purge age. Read-only: deleting candidates is the caller's job.
std::vector<FileRecord> purge_scan(const std::vector<FileRecord>& files, Seconds now,
                                   const FsConfig& cfg);

/// Per-job and persistent burst-buffer space.
class BurstBuffer {
 public:
  BurstBuffer(std::uint64_t capacity, std::uint64_t per_user_quota);

  /// Creates the empty per-job directory and returns its path.
  std::string on_job_start(JobId job, const std::string& user);
  /// Deletes the job directory and everything in it; returns bytes freed.
  std::uint64_t on_job_end(JobId job);

  /// Writes into a running job's directory. False when capacity or the
  /// user's quota would be exceeded.
  bool write_job(JobId job, std::uint64_t bytes);
  bool write_persistent(const std::string& user, std::uint64_t bytes);
  void remove_persistent(const std::string& user, std::uint64_t bytes);

  bool job_dir_exists(JobId job) const { return jobs_.count(job) != 0; }
  std::optional<std::string> job_dir(JobId job) const;
  std::uint64_t job_dir_usage(JobId job) const;
  std::uint64_t persistent_usage(const std::string& user) const;
  std::uint64_t user_usage(const std::string& user) const;
  std::uint64_t used() const { return used_; }
  std::uint64_t capacity() const { return capacity_; }

 private:
  struct JobDir {
    std::string user;
    std::string path;
    std::uint64_t bytes = 0;
  };
  bool fits(const std::string& user, std::uint64_t bytes) const;

  std::uint64_t capacity_;
  std::uint64_t per_user_quota_;
  std::uint64_t used_ = 0;
  std::map<JobId, JobDir> jobs_;
  std::map<std::string, std::uint64_t> persistent_;
};

struct UsageRow {
  FileSystem fs = FileSystem::scratch;
  std::string principal;  // user or group, per the file system's quota scope
  std::uint64_t used = 0;  // block-accounted
  std::optional<std::uint64_t> quota;
  std::size_t files = 0;
};

/// diskUsage-style table: one row per (file system, principal).
std::vector<UsageRow> usage_report(const std::vector<FileRecord>& files, const FsConfig& cfg);

std::string format_bytes(std::uint64_t bytes);

}  // namespace nsim
