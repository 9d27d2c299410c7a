#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <set>
#include <sstream>

#include "nsim/workload.hpp"

using namespace nsim;

namespace {

TraceParseResult parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

std::string swf_line(JobId id, Seconds submit, Seconds runtime, int nodes, Seconds walltime,
                     const std::string& user = "1", const std::string& group = "1") {
  std::ostringstream o;
  o << id << ' ' << submit << " -1 " << runtime << ' ' << nodes << " -1 -1 " << nodes << ' ' << walltime
    << " -1 1 " << user << ' ' << group << " -1 -1 -1 -1 -1\n";
  return o.str();
}

}  // namespace

TEST_CASE("empty trace gives an empty list") {
  auto r = parse_text("");
  CHECK(r.jobs.empty());
  CHECK(r.diagnostics.empty());
  r = parse_text("; only a comment\n\n   \n");
  CHECK(r.jobs.empty());
}

TEST_CASE("one valid line maps to one job") {
  auto r = parse_text(swf_line(1, 0, 1800, 1, 3600));
  REQUIRE(r.jobs.size() == 1);
  const Job& j = r.jobs[0];
  CHECK(j.id == 1);
  CHECK(j.nodes_requested == 1);
  CHECK(j.walltime_requested == 3600);
  CHECK(j.actual_runtime == 1800);
  CHECK(j.user == "u1");
  CHECK(j.group == "g1");
  CHECK(j.partition == "compute");
  CHECK(j.qos.empty());
  CHECK(j.tasks_per_node == 40);
  CHECK(j.submit_cwd_fs == FileSystem::scratch);
}

TEST_CASE("zero-node line is skipped with a line-numbered diagnostic") {
  auto r = parse_text(swf_line(1, 0, 10, 1, 3600) + swf_line(2, 5, 10, 0, 3600));
  CHECK(r.jobs.size() == 1);
  CHECK(r.skipped == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].line == 2);
  CHECK(r.diagnostics[0].message.find("at least one node") != std::string::npos);
}

TEST_CASE("malformed lines are reported, not fatal") {
  auto r = parse_text("1 2 3\n" + swf_line(7, 0, 10, 1, 60) + "x 0 -1 10 1 -1 -1 1 60 -1 1 1 1 -1 -1 -1 -1 -1\n");
  CHECK(r.jobs.size() == 1);
  CHECK(r.skipped == 2);
  CHECK(r.diagnostics[0].line == 1);
  CHECK(r.diagnostics[1].line == 3);
}

TEST_CASE("runtime above walltime is truncated; unknown runtime means full walltime") {
  auto r = parse_text(swf_line(1, 0, 9000, 2, 3600) + swf_line(2, 0, -1, 2, 3600));
  REQUIRE(r.jobs.size() == 2);
  CHECK(r.jobs[0].actual_runtime == 3600);
  CHECK(r.jobs[1].actual_runtime == 3600);
}

TEST_CASE("duplicate ids are skipped and output is sorted by submit time") {
  auto r = parse_text(swf_line(3, 50, 1, 1, 60) + swf_line(1, 10, 1, 1, 60) + swf_line(3, 5, 1, 1, 60));
  REQUIRE(r.jobs.size() == 2);
  CHECK(r.jobs[0].id == 1);
  CHECK(r.jobs[1].id == 3);
  CHECK(r.skipped == 1);
}

TEST_CASE("extension columns") {
  auto r = parse_text("1 0 -1 10 2 -1 -1 2 60 -1 1 alice physics -1 priority debug -1 -1 80 home 1\n");
  REQUIRE(r.jobs.size() == 1);
  const Job& j = r.jobs[0];
  CHECK(j.user == "alice");
  CHECK(j.group == "physics");
  CHECK(j.qos == "priority");
  CHECK(j.partition == "debug");
  CHECK(j.tasks_per_node == 80);
  CHECK(j.hyperthreaded());
  CHECK(j.submit_cwd_fs == FileSystem::home);
  CHECK(j.needs_network);

  r = parse_text("1 0 -1 10 2 -1 -1 2 60 -1 1 a b -1 -1 -1 -1 -1 81\n");
  CHECK(r.jobs.empty());
  CHECK(r.skipped == 1);
}

TEST_CASE("unreadable file throws") {
  CHECK_THROWS_AS(parse_trace(std::filesystem::path("/nonexistent/trace.swf")), std::runtime_error);
}

TEST_CASE("emit then parse is the identity") {
  WorkloadSpec spec;
  spec.debug_fraction = 0.1;
  spec.hyperthread_fraction = 0.2;
  spec.home_submit_fraction = 0.1;
  spec.seed = 99;
  auto jobs = generate_workload(spec, 50 * kHour);
  jobs[0].qos = "priority";
  jobs[1].needs_network = true;
  jobs[2].submit_cwd_fs = FileSystem::project;
  std::ostringstream out;
  emit_trace(out, jobs);
  auto back = parse_text(out.str());
  CHECK(back.diagnostics.empty());
  CHECK(back.jobs == jobs);
}

TEST_CASE("zero rate gives an empty workload; bad inputs throw") {
  WorkloadSpec spec;
  spec.arrival_rate_per_hour = 0;
  CHECK(generate_workload(spec, 100 * kHour).empty());
  spec.arrival_rate_per_hour = -1;
  CHECK_THROWS(generate_workload(spec, 100 * kHour));
  spec.arrival_rate_per_hour = 10;
  CHECK_THROWS(generate_workload(spec, 0));
  CHECK_THROWS(generate_workload(spec, -5));
}

TEST_CASE("fixed seed reproduces the same stream byte for byte") {
  WorkloadSpec spec;
  spec.seed = 1234;
  std::ostringstream a, b;
  emit_trace(a, generate_workload(spec, 100 * kHour));
  emit_trace(b, generate_workload(spec, 100 * kHour));
  CHECK(a.str() == b.str());
  spec.seed = 1235;
  std::ostringstream c;
  emit_trace(c, generate_workload(spec, 100 * kHour));
  CHECK(a.str() != c.str());
}

TEST_CASE("Poisson arrival count stays within three sigma of the mean") {
  const double mean = 10.0 * 100.0;
  for (std::uint64_t seed : {1u, 2u, 3u, 42u, 2024u}) {
    WorkloadSpec spec;
    spec.seed = seed;
    const auto jobs = generate_workload(spec, 100 * kHour);
    CHECK(std::abs(static_cast<double>(jobs.size()) - mean) <= 3.0 * std::sqrt(mean));
  }
}

TEST_CASE("generated jobs satisfy every invariant") {
  WorkloadSpec spec;
  spec.debug_fraction = 0.2;
  spec.hyperthread_fraction = 0.3;
  spec.start_time = 1000;
  spec.first_id = 500;
  const Seconds horizon = 200 * kHour;
  const auto jobs = generate_workload(spec, horizon);
  REQUIRE_FALSE(jobs.empty());
  std::set<JobId> ids;
  for (const Job& j : jobs) {
    CHECK(job_violations(j).empty());
    CHECK(j.actual_runtime <= j.walltime_requested);
    CHECK(j.submit_time >= spec.start_time);
    CHECK(j.submit_time < spec.start_time + horizon);
    CHECK(ids.insert(j.id).second);
    if (j.partition == "debug") {
      CHECK(j.walltime_requested <= kHour);
      CHECK(j.nodes_requested <= 4);
    }
  }
  CHECK(*ids.begin() == 500);
  CHECK(std::is_sorted(jobs.begin(), jobs.end(),
                       [](const Job& a, const Job& b) { return a.submit_time < b.submit_time; }));
}
