#include <doctest.h>

#include <stdexcept>
#include <set>

#include "nsim/fspolicy.hpp"

using namespace nsim;

namespace {

const FsConfig& fs() {
  static const FsConfig cfg = default_fs_config();
  return cfg;
}

FileRecord scratch_file(const std::string& name, Seconds atime) {
  return {"/scratch/g/grp/u/" + name, "u", "grp", 10, atime, FileSystem::scratch};
}

}  // namespace

TEST_CASE("layout paths") {
  CHECK(layout_path(FileSystem::home, "peltier", "alice") == "/home/p/peltier/alice");
  CHECK(layout_path(FileSystem::scratch, "x", "x") == "/scratch/x/x/x");
  CHECK(layout_path(FileSystem::project, "Rrg-Ab", "bob") == "/project/r/Rrg-Ab/bob");
  CHECK_THROWS(layout_path(FileSystem::home, "", "alice"));
  CHECK_THROWS(layout_path(FileSystem::home, "g", ""));
}

TEST_CASE("layout is injective over a small grid") {
  std::set<std::string> seen;
  std::size_t n = 0;
  for (auto f : {FileSystem::home, FileSystem::scratch, FileSystem::project, FileSystem::bb})
    for (std::string g : {"a", "ab", "b", "ba"})
      for (std::string u : {"a", "b", "ab"}) {
        seen.insert(layout_path(f, g, u));
        ++n;
      }
  CHECK(seen.size() == n);
}

TEST_CASE("block rounding") {
  const auto& scratch = fs().spec(FileSystem::scratch);
  CHECK(accounted_bytes(scratch, 1) == 16 * kMiB);
  CHECK(accounted_bytes(scratch, 16 * kMiB) == 16 * kMiB);
  CHECK(accounted_bytes(scratch, 16 * kMiB + 1) == 32 * kMiB);
  CHECK(accounted_bytes(scratch, 0) == 0);
  CHECK(accounted_bytes(fs().spec(FileSystem::home), 1) == kMiB);
  CHECK(accounted_bytes(fs().spec(FileSystem::hpss), 12345) == 12345);
}

TEST_CASE("home quota boundary at 100 GB") {
  const auto& home = fs().spec(FileSystem::home);
  CHECK(check_quota(home, 0, static_cast<std::int64_t>(100 * kGiB)).accepted);
  CHECK_FALSE(check_quota(home, 0, static_cast<std::int64_t>(100 * kGiB + 1)).accepted);
  CHECK_FALSE(check_quota(home, static_cast<std::int64_t>(100 * kGiB), 1).accepted);
  CHECK(check_quota(home, static_cast<std::int64_t>(100 * kGiB), 0).accepted);
}

TEST_CASE("scratch quota boundary at 25 TB") {
  const auto& scratch = fs().spec(FileSystem::scratch);
  CHECK(check_quota(scratch, 0, static_cast<std::int64_t>(25 * kTiB)).accepted);
  auto v = check_quota(scratch, static_cast<std::int64_t>(25 * kTiB - 16 * kMiB), 1);
  CHECK(v.accepted);
  CHECK(v.charged_delta == static_cast<std::int64_t>(16 * kMiB));
  CHECK(v.resulting_usage == static_cast<std::int64_t>(25 * kTiB));
  CHECK_FALSE(check_quota(scratch, static_cast<std::int64_t>(25 * kTiB), 1).accepted);
}

TEST_CASE("bb quota boundary at 10 TB") {
  const auto& bb = fs().spec(FileSystem::bb);
  CHECK(check_quota(bb, 0, static_cast<std::int64_t>(10 * kTiB)).accepted);
  CHECK_FALSE(check_quota(bb, 0, static_cast<std::int64_t>(10 * kTiB + 1)).accepted);
}

TEST_CASE("negative deltas release whole blocks") {
  const auto& scratch = fs().spec(FileSystem::scratch);
  auto v = check_quota(scratch, static_cast<std::int64_t>(32 * kMiB), -1);
  CHECK(v.accepted);
  CHECK(v.charged_delta == -static_cast<std::int64_t>(16 * kMiB));
}

TEST_CASE("group-allocated file systems take the quota from the caller") {
  const auto& project = fs().spec(FileSystem::project);
  CHECK_FALSE(project.quota_bytes);
  CHECK(check_quota(project, 0, static_cast<std::int64_t>(kTiB), kTiB).accepted);
  CHECK_FALSE(check_quota(project, 0, static_cast<std::int64_t>(kTiB) + 1, kTiB).accepted);
}

TEST_CASE("access table") {
  using C = AccessContext;
  using M = AccessMode;
  CHECK_FALSE(access(fs().spec(FileSystem::home), C::compute, M::write));
  CHECK(access(fs().spec(FileSystem::home), C::compute, M::read));
  CHECK(access(fs().spec(FileSystem::home), C::login, M::write));
  CHECK(access(fs().spec(FileSystem::scratch), C::compute, M::write));
  CHECK(access(fs().spec(FileSystem::project), C::compute, M::write));
  CHECK(access(fs().spec(FileSystem::bb), C::compute, M::write));
  CHECK_FALSE(access(fs().spec(FileSystem::hpss), C::login, M::read));
  CHECK_FALSE(access(fs().spec(FileSystem::hpss), C::compute, M::read));
}

TEST_CASE("stock file-system properties") {
  CHECK(fs().spec(FileSystem::home).on_compute == ComputeAccess::ro);
  CHECK(fs().spec(FileSystem::hpss).on_compute == ComputeAccess::absent);
  CHECK(fs().spec(FileSystem::scratch).purge_age == 60 * kDay);
  CHECK(fs().spec(FileSystem::bb).purge_age);
  CHECK_FALSE(fs().spec(FileSystem::home).purge_age);
  CHECK_FALSE(fs().spec(FileSystem::project).purge_age);
  CHECK(fs().spec(FileSystem::home).backed_up);
  CHECK_FALSE(fs().spec(FileSystem::scratch).backed_up);
  CHECK(fs().bb_capacity == 256 * kTiB);
  CHECK(fs().validate().empty());
}

TEST_CASE("purge boundary at 60 days") {
  const Seconds now = 100 * kDay;
  std::vector<FileRecord> files{scratch_file("old59", now - 59 * kDay), scratch_file("old61", now - 61 * kDay),
                                scratch_file("exact", now - 60 * kDay)};
  auto c = purge_scan(files, now, fs());
  REQUIRE(c.size() == 1);
  CHECK(c[0].path.find("old61") != std::string::npos);
  CHECK(purge_scan({}, now, fs()).empty());
}

TEST_CASE("purge ignores file systems without a purge rule") {
  FileRecord f{"/home/g/grp/u/x", "u", "grp", 1, 0, FileSystem::home};
  CHECK(purge_scan({f}, 1000 * kDay, fs()).empty());
}

TEST_CASE("purge scan is idempotent and monotone in time") {
  std::vector<FileRecord> files;
  for (int d = 0; d < 100; ++d) files.push_back(scratch_file("f" + std::to_string(d), d * kDay));
  const Seconds t = 120 * kDay;
  auto a = purge_scan(files, t, fs());
  auto b = purge_scan(files, t, fs());
  CHECK(a.size() == b.size());
  auto later = purge_scan(files, t + 10 * kDay, fs());
  std::set<std::string> later_paths;
  for (auto& f : later) later_paths.insert(f.path);
  for (auto& f : a) CHECK(later_paths.count(f.path));
  CHECK(later.size() > a.size());
}

TEST_CASE("burst buffer job directory lifecycle") {
  BurstBuffer bb(256 * kTiB, 10 * kTiB);
  const auto path = bb.on_job_start(42, "alice");
  CHECK(path == "/bb/jobs/42");
  CHECK(bb.job_dir_exists(42));
  CHECK(bb.job_dir_usage(42) == 0);
  CHECK(bb.on_job_end(42) == 0);
  CHECK_FALSE(bb.job_dir_exists(42));
  CHECK(bb.used() == 0);
}

TEST_CASE("job end reclaims job data but keeps persistent data") {
  BurstBuffer bb(256 * kTiB, 10 * kTiB);
  bb.on_job_start(7, "alice");
  REQUIRE(bb.write_job(7, kTiB));
  REQUIRE(bb.write_persistent("alice", 2 * kTiB));
  CHECK(bb.used() == 3 * kTiB);
  CHECK(bb.on_job_end(7) == kTiB);
  CHECK(bb.persistent_usage("alice") == 2 * kTiB);
  CHECK(bb.used() == 2 * kTiB);
}

TEST_CASE("burst buffer quotas and capacity") {
  BurstBuffer bb(15 * kTiB, 10 * kTiB);
  bb.on_job_start(1, "alice");
  CHECK(bb.write_job(1, 10 * kTiB));
  CHECK_FALSE(bb.write_persistent("alice", 1));
  CHECK(bb.write_persistent("bob", 5 * kTiB));
  CHECK_FALSE(bb.write_persistent("carol", 1));
  CHECK(bb.used() <= bb.capacity());
  CHECK_THROWS(bb.write_job(99, 1));
}

TEST_CASE("usage report charges whole blocks per principal") {
  std::vector<FileRecord> files{
      {"/scratch/g/grp/u/a", "u", "grp", 1, 0, FileSystem::scratch},
      {"/scratch/g/grp/u/b", "u", "grp", 1, 0, FileSystem::scratch},
      {"/project/g/grp/u/c", "u", "grp", 1, 0, FileSystem::project},
  };
  auto rows = usage_report(files, fs());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].fs == FileSystem::scratch);
  CHECK(rows[0].principal == "u");
  CHECK(rows[0].used == 32 * kMiB);
  CHECK(rows[0].files == 2);
  CHECK(rows[1].principal == "grp");
  CHECK(format_bytes(100 * kGiB) == "100.00 GiB");
  CHECK(format_bytes(512) == "512 B");
}

TEST_CASE("negative quota in config is invalid") {
  FsConfig cfg = default_fs_config();
  cfg.bb_capacity = 0;
  CHECK_FALSE(cfg.validate().empty());
}
