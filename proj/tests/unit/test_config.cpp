#include <doctest.h>

#include <stdexcept>
#include <algorithm>
#include <sstream>

#include "nsim/config.hpp"

using namespace nsim;

namespace {

std::string serialized(const Config& c) {
  std::ostringstream o;
  write_config(o, c);
  return o.str();
}

LoadedConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.ini");
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("built-in defaults are valid and warning-free") {
  const auto cfg = niagara_default_config();
  CHECK(validate_config(cfg).empty());
  CHECK(config_warnings(cfg).empty());
  CHECK(cfg.scheduler.weights.w_partition == 2 * cfg.scheduler.weights.w_fairshare);
  CHECK(cfg.scheduler.weights.w_qos == cfg.scheduler.weights.w_fairshare);
  CHECK(cfg.scheduler.weights.w_size < cfg.scheduler.weights.w_fairshare);
}

TEST_CASE("stock partition table") {
  const auto cfg = niagara_default_config();
  const auto& parts = cfg.scheduler.partitions;
  const auto* compute = find_partition(parts, "compute");
  REQUIRE(compute);
  CHECK(compute->max_nodes == 1000);
  CHECK(compute->min_walltime == 900);
  CHECK(compute->max_walltime == 86400);
  CHECK(compute->eligible_nodes.size() == 1495);
  CHECK(compute->node_exclusive);
  const auto* debug = find_partition(parts, "debug");
  REQUIRE(debug);
  CHECK(debug->dedicated_nodes.size() == 5);
  CHECK(debug->eligible_nodes.size() == 1500);
  CHECK(debug->max_jobs_per_user == 1u);
  CHECK(debug->max_walltime == kHour);
  for (int w = 1; w <= 4; ++w) {
    const auto* df = find_partition(parts, "dragonfly" + std::to_string(w));
    REQUIRE(df);
    CHECK(df->wing_restriction == WingId{static_cast<std::uint32_t>(w - 1)});
  }
  CHECK(find_partition(parts, "archive-short")->max_jobs_per_user == 75u);
  CHECK(find_partition(parts, "archive-long")->max_walltime == 3 * kDay);
  CHECK(find_partition(parts, "archive-long")->max_jobs_per_user == 5u);
  CHECK(find_partition(parts, "archive-interactive")->max_jobs_per_user == 48u);
  CHECK_FALSE(find_partition(parts, "archive-short")->node_exclusive);
  double total = 0;
  for (auto& [g, s] : cfg.scheduler.allocations.shares) total += s;
  CHECK(total <= 0.94 + 1e-12);
}

TEST_CASE("checked-in default profile loads and equals the built-in defaults") {
  const auto loaded = load_config(std::filesystem::path(NSIM_SOURCE_DIR) / "config" / "niagara-default.ini");
  CHECK(loaded.warnings.empty());
  CHECK(serialized(loaded.config) == serialized(niagara_default_config()));
}

TEST_CASE("write then parse round-trips") {
  auto cfg = niagara_default_config();
  cfg.profile = "custom";
  cfg.scheduler.weights.w_age = 123.25;
  cfg.scheduler.backfill = BackfillMode::none;
  cfg.workload.seed = 77;
  const auto text = serialized(cfg);
  CHECK(serialized(parse_text(text).config) == text);
}

TEST_CASE("a profile overrides only what it names") {
  auto loaded = parse_text("[weights]\nage = 250\n[topology]\ninter_wing_blocking = 3\n");
  CHECK(loaded.config.scheduler.weights.w_age == 250);
  CHECK(loaded.config.topology.inter_wing_blocking == 3.0);
  CHECK(loaded.config.scheduler.weights.w_fairshare == 1000);
}

TEST_CASE("weight ratios off the published policy warn in faithful profiles") {
  auto w = parse_text("[weights]\npartition = 1500\n").warnings;
  CHECK(mentions(w, "twice"));
  w = parse_text("[weights]\nqos = 10\nsize = 5000\n").warnings;
  CHECK(w.size() == 2);
  w = parse_text("[profile]\npublished_policy = false\n[weights]\npartition = 1500\n").warnings;
  CHECK(w.empty());
}

TEST_CASE("negative quota is an error") {
  auto e = errors_of("[fs.home]\nquota = -5G\n");
  REQUIRE_FALSE(e.empty());
  CHECK(mentions(e, "quota"));
}

TEST_CASE("every violation is reported, not just the first") {
  auto e = errors_of(
      "[topology]\nwings = 0\n"
      "[weights]\nage = -1\n"
      "[scheduler]\nbackfill = greedy\n"
      "[allocations]\na = 0.5\nb = 0.5\n");
  CHECK(e.size() >= 4);
  CHECK(mentions(e, "wing"));
  CHECK(mentions(e, "backfill"));
  CHECK(mentions(e, "allocat"));
}

TEST_CASE("unknown keys and sections are errors") {
  CHECK(mentions(errors_of("[weights]\nagee = 1\n"), "agee"));
  CHECK(mentions(errors_of("[bogus]\nx = 1\n"), "bogus"));
  CHECK_FALSE(errors_of("[fs.tape]\nquota = 1\n").empty());
}

TEST_CASE("dedicated nodes must be eligible and exclusive") {
  auto e = errors_of(
      "[partitions.compute]\neligible_nodes = 0-99\n"
      "[partitions.debug]\nmax_walltime = 1h\nmin_walltime = 0\neligible_nodes = 90-99\ndedicated_nodes = 90-99\n");
  CHECK(mentions(e, "dedicated"));
  e = errors_of("[partitions.debug]\neligible_nodes = 0-9\ndedicated_nodes = 20\n");
  CHECK(mentions(e, "dedicated"));
}

TEST_CASE("missing file") {
  try {
    load_config("/definitely/not/here.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/definitely/not/here.ini") != std::string::npos);
  }
}

TEST_CASE("value helpers") {
  CHECK(parse_duration("90") == 90);
  CHECK(parse_duration("15m") == 900);
  CHECK(parse_duration("24h") == 86400);
  CHECK(parse_duration("3d") == 3 * kDay);
  CHECK(parse_duration("01:30:00") == 5400);
  CHECK(parse_duration("2-00:00:00") == 2 * kDay);
  CHECK_THROWS(parse_duration("abc"));
  for (Seconds s : {Seconds{0}, Seconds{59}, Seconds{900}, kHour, 3 * kDay, Seconds{90061}})
    CHECK(parse_duration(format_duration(s)) == s);

  CHECK(parse_bytes("512") == 512);
  CHECK(parse_bytes("1M") == kMiB);
  CHECK(parse_bytes("100G") == 100 * kGiB);
  CHECK(parse_bytes("25T") == 25 * kTiB);
  CHECK_THROWS(parse_bytes("-1"));
  CHECK_THROWS(parse_bytes("12X"));

  const auto nodes = parse_node_ranges("7, 0-3,2");
  CHECK(nodes.size() == 5);
  CHECK(format_node_ranges(nodes) == "0-3,7");
  CHECK(parse_node_ranges("").empty());
  CHECK_THROWS(parse_node_ranges("5-2"));
}
