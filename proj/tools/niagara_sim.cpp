// niagara-sim: command-line front end for the simulator.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or config error.
// submit-check maps its verdict onto 0 accept / 1 warnings / 2 reject.

#include <CLI11.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nsim/config.hpp"
#include "nsim/fspolicy.hpp"
#include "nsim/lpbm.hpp"
#include "nsim/metrics.hpp"
#include "nsim/simulator.hpp"
#include "nsim/submit_filter.hpp"
#include "nsim/workload.hpp"

namespace fs = std::filesystem;
using namespace nsim;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "nsim-out";
};

Config load(const std::string& path, const Globals& g) {
  Config cfg = niagara_default_config();
  if (!path.empty()) {
    LoadedConfig loaded = load_config(path);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    cfg = std::move(loaded.config);
  }
  if (g.seed) cfg.workload.seed = *g.seed;
  return cfg;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

Seconds duration_arg(const std::string& text) {
  try {
    return parse_duration(text);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::vector<Job> workload_for(const Config& cfg, const std::string& trace, Seconds horizon) {
  if (trace.empty()) return generate_workload(cfg.workload, horizon > 0 ? horizon : cfg.workload_horizon);
  auto parsed = parse_trace(fs::path(trace));
  for (const auto& d : parsed.diagnostics) std::cerr << trace << ":" << d.line << ": " << d.message << "\n";
  return parsed.jobs;
}

void write_summary(std::ostream& out, const SimulationResult& r) {
  std::size_t done = 0, rejected = 0;
  for (const auto& j : r.jobs) {
    done += j.phase == JobPhase::completed;
    rejected += j.phase == JobPhase::rejected;
  }
  const auto waits = wait_time_stats(r);
  out << "jobs " << r.jobs.size() << "\ncompleted " << done << "\nrejected " << rejected << "\nstart "
      << r.start_time << "\nend " << r.end_time << "\nutilization " << std::fixed << std::setprecision(4)
      << utilization(r, r.start_time, r.end_time) << "\nmean_wait_s " << std::setprecision(1) << waits.mean
      << "\nscheduler_passes " << r.scheduler_passes << "\nfiles_purged " << r.files_purged << "\n";
}

void run_one(const Config& cfg, const std::vector<Job>& jobs, const fs::path& dir, std::ostream& summary) {
  const auto r = run_simulation(jobs, cfg);
  auto records = open_out(dir / "jobs.csv");
  write_job_records(records, r);
  auto events = open_out(dir / "events.log");
  write_event_log(events, r);
  auto sum = open_out(dir / "summary.txt");
  write_summary(sum, r);
  write_summary(summary, r);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Globals& g, const std::string& trace, const std::string& horizon,
                 const std::vector<std::string>& sweep) {
  const Seconds h = horizon.empty() ? 0 : duration_arg(horizon);
  if (sweep.empty()) {
    const Config cfg = load(g.config_path, g);
    run_one(cfg, workload_for(cfg, trace, h), g.out_dir, std::cout);
    return kOk;
  }
  // Independent configs in parallel, each with its own output directory.
  std::vector<Config> cfgs;
  std::vector<fs::path> dirs;
  for (const auto& path : sweep) {
    cfgs.push_back(load(path, g));
    fs::path dir = fs::path(g.out_dir) / fs::path(path).stem();
    if (std::find(dirs.begin(), dirs.end(), dir) != dirs.end())
      throw UsageError("two sweep configs share the output name " + dir.string());
    dirs.push_back(dir);
  }
  std::vector<std::future<std::string>> runs;
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    runs.push_back(std::async(std::launch::async, [&, i] {
      std::ostringstream s;
      run_one(cfgs[i], workload_for(cfgs[i], trace, h), dirs[i], s);
      return s.str();
    }));
  for (std::size_t i = 0; i < runs.size(); ++i) std::cout << "[" << dirs[i].string() << "]\n" << runs[i].get();
  return kOk;
}

int cmd_topo(const Globals& g) {
  const Config cfg = load(g.config_path, g);
  std::cout << Topology(cfg.topology).describe();
  return kOk;
}

int cmd_workload_gen(const Globals& g, const std::string& horizon, std::optional<double> rate,
                     const std::string& output) {
  Config cfg = load(g.config_path, g);
  if (rate) cfg.workload.arrival_rate_per_hour = *rate;
  const Seconds h = horizon.empty() ? cfg.workload_horizon : duration_arg(horizon);
  const auto jobs = generate_workload(cfg.workload, h);
  if (output.empty() || output == "-") {
    emit_trace(std::cout, jobs);
  } else {
    auto out = open_out(output);
    emit_trace(out, jobs);
  }
  std::cerr << jobs.size() << " jobs\n";
  return kOk;
}

// key = value job description; unknown keys are a usage error.
Job read_job_file(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(e.what());
  }
  Job j;
  j.user = "user";
  j.group = "g00";
  j.actual_runtime = -1;
  for (const auto& [key, node] : tree) {
    const std::string v = node.get_value<std::string>();
    try {
      if (key == "id") j.id = std::stoll(v);
      else if (key == "user") j.user = v;
      else if (key == "group") j.group = v;
      else if (key == "partition") j.partition = v;
      else if (key == "qos") j.qos = v;
      else if (key == "nodes") j.nodes_requested = static_cast<std::uint32_t>(std::stoul(v));
      else if (key == "walltime") j.walltime_requested = parse_duration(v);
      else if (key == "runtime") j.actual_runtime = parse_duration(v);
      else if (key == "tasks_per_node") j.tasks_per_node = static_cast<std::uint32_t>(std::stoul(v));
      else if (key == "submit_time") j.submit_time = parse_duration(v);
      else if (key == "network") j.needs_network = v == "true" || v == "yes" || v == "1";
      else if (key == "cwd") {
        if (!parse_file_system(v, j.submit_cwd_fs)) throw UsageError(path + ": unknown file system '" + v + "'");
      } else {
        throw UsageError(path + ": unknown key '" + key + "'");
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError(path + ": bad value for '" + key + "': " + v);
    }
  }
  if (j.actual_runtime < 0) j.actual_runtime = j.walltime_requested;
  return j;
}

int cmd_submit_check(const Globals& g, const std::string& job_file, const std::string& rules,
                     std::uint32_t active_jobs) {
  const Config cfg = load(g.config_path, g);
  if (!rules.empty()) {
    try {
      std::cout << explain_rules(cfg.scheduler, rules);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return kOk;
  }
  if (job_file.empty()) throw UsageError("submit-check needs a job file or --rules PARTITION");
  const Job job = read_job_file(job_file);
  const Topology topo(cfg.topology);
  const Verdict v = validate_submission(job, cfg.scheduler, {active_jobs, &topo});
  std::cout << to_string(v.kind) << "\n";
  for (const auto& f : v.findings) std::cout << "  " << f.rule << ": " << f.message << "\n";
  switch (v.kind) {
    case VerdictKind::accept: return 0;
    case VerdictKind::accept_with_warnings: return 1;
    case VerdictKind::reject: return 2;
  }
  return kFailure;
}

// CSV: path,user,group,bytes,atime,fs
std::vector<FileRecord> read_inventory(const std::string& path) {
  auto in = open_in(path);
  std::vector<FileRecord> files;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#' || (n == 1 && line.rfind("path,", 0) == 0)) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    FileRecord r;
    try {
      if (f.size() != 6) throw std::invalid_argument("expected 6 fields");
      r.path = f[0];
      r.user = f[1];
      r.group = f[2];
      r.size = parse_bytes(f[3]);
      r.atime = std::stoll(f[4]);
      if (!parse_file_system(f[5], r.fs)) throw std::invalid_argument("unknown file system '" + f[5] + "'");
    } catch (const std::exception& e) {
      throw UsageError(path + ":" + std::to_string(n) + ": " + e.what());
    }
    files.push_back(std::move(r));
  }
  return files;
}

int cmd_fs_report(const Globals& g, const std::string& inventory, const std::string& purge_at) {
  const Config cfg = load(g.config_path, g);
  const auto files = read_inventory(inventory);
  std::cout << std::left << std::setw(9) << "fs" << std::setw(16) << "principal" << std::right << std::setw(14)
            << "used" << std::setw(14) << "quota" << std::setw(8) << "files" << "\n";
  for (const auto& row : usage_report(files, cfg.fs)) {
    std::cout << std::left << std::setw(9) << to_string(row.fs) << std::setw(16) << row.principal << std::right
              << std::setw(14) << format_bytes(row.used) << std::setw(14)
              << (row.quota ? format_bytes(*row.quota) : "-") << std::setw(8) << row.files << "\n";
  }
  if (!purge_at.empty()) {
    const auto candidates = purge_scan(files, duration_arg(purge_at), cfg.fs);
    std::cout << "\npurge candidates at " << purge_at << ": " << candidates.size() << "\n";
    for (const auto& f : candidates) std::cout << "  " << f.path << "\n";
  }
  return kOk;
}

int cmd_lpbm(const Globals& g, const std::string& results, const std::string& reference,
             const std::string& points) {
  const Config cfg = load(g.config_path, g);
  auto parse = [](const std::string& path, auto fn) {
    auto in = open_in(path);
    try {
      return fn(in);
    } catch (const std::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  };
  const auto all = parse(results, [](std::istream& in) { return lpbm::parse_results(in); });
  const auto ref = parse(reference, [](std::istream& in) { return lpbm::parse_results(in); });
  if (ref.empty()) throw UsageError(reference + ": no results");

  // Group proposed results by system, keeping first-seen order.
  std::vector<std::string> systems;
  std::map<std::string, std::vector<lpbm::BenchmarkResult>> by_system;
  for (const auto& r : all) {
    if (!by_system.count(r.system)) systems.push_back(r.system);
    by_system[r.system].push_back(r);
  }
  std::map<std::string, double> scores;
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& s : systems) {
    lpbm::Score sc;
    try {
      sc = lpbm::lpbm_score(by_system[s], ref, cfg.lpbm.options);
    } catch (const std::invalid_argument& e) {
      throw UsageError(s + ": " + e.what());
    }
    for (const auto& w : sc.warnings) std::cerr << "warning: " << s << ": " << w << "\n";
    std::cout << s << "\n";
    for (const auto& sp : sc.speedups) std::cout << "  " << std::left << std::setw(10) << sp.benchmark << std::right
                                                 << std::setw(12) << sp.value << "\n";
    std::cout << "  " << std::left << std::setw(10) << "LPBM" << std::right << std::setw(12) << sc.value << "\n";
    scores[s] = sc.value;
  }
  if (points.empty()) return kOk;

  auto cards = parse(points, [](std::istream& in) { return lpbm::parse_points(in); });
  for (auto& c : cards) {
    auto it = scores.find(c.name);
    if (it == scores.end()) throw UsageError(points + ": no benchmark results for '" + c.name + "'");
    c.lpbm_score = it->second;
  }
  const auto ranking = lpbm::rank_proposals(cards, cfg.lpbm.weights, cfg.lpbm.shortlist);
  std::cout << "\nrank,system,score,shortlisted\n";
  for (std::size_t k = 0; k < ranking.order.size(); ++k) {
    const auto i = ranking.order[k];
    std::cout << k + 1 << "," << cards[i].name << "," << ranking.scores[i] << ","
              << (k < ranking.shortlist.size() ? "yes" : "no") << "\n";
  }
  return kOk;
}

int cmd_report(const Globals& g, std::string jobs_path, bool util, const std::string& bucket,
               const std::string& qsum_at, bool waits, bool locality) {
  if (jobs_path.empty()) jobs_path = (fs::path(g.out_dir) / "jobs.csv").string();
  auto in = open_in(jobs_path);
  SimulationResult r;
  try {
    r = read_job_records(in);
  } catch (const std::exception& e) {
    throw UsageError(jobs_path + ": " + e.what());
  }
  if (!util && qsum_at.empty() && !waits && !locality) util = waits = true;
  bool first = true;
  auto section = [&] {
    if (!first) std::cout << "\n";
    first = false;
  };
  if (util) {
    section();
    write_utilization_csv(std::cout, utilization_series(r, r.start_time, r.end_time, duration_arg(bucket)));
  }
  if (!qsum_at.empty()) {
    section();
    write_qsum(std::cout, qsum(r, duration_arg(qsum_at)));
  }
  if (waits) {
    section();
    std::cout << kWaitStatsHeader << "\n";
    write_wait_stats(std::cout, "all", wait_time_stats(r));
    std::set<std::string> parts;
    for (const auto& j : r.jobs) parts.insert(j.job.partition);
    for (const auto& p : parts) {
      JobFilter f;
      f.partition = p;
      write_wait_stats(std::cout, p, wait_time_stats(r, f));
    }
  }
  if (locality) {
    section();
    write_locality_csv(std::cout, locality_report(r));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of a 1500-node, 4-wing batch system", "niagara-sim"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--config", g.config_path, "Config file (default: built-in stock profile)");
  app.add_option("--seed", g.seed, "Override the workload generator seed");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  std::function<int()> action;

  auto* sim = app.add_subcommand("simulate", "Run a workload to completion and write results");
  std::string trace, horizon;
  std::vector<std::string> sweep;
  sim->add_option("--workload", trace, "Trace file; without it a workload is generated from the config");
  sim->add_option("--horizon", horizon, "Generated workload span, e.g. 7d");
  sim->add_option("--sweep", sweep, "Run several config files in parallel, one output directory each");
  sim->callback([&] { action = [&] { return cmd_simulate(g, trace, horizon, sweep); }; });

  auto* topo = app.add_subcommand("topo", "Network topology");
  topo->require_subcommand(1);
  topo->add_subcommand("describe", "Print wings, switches and per-wing populations")->callback([&] {
    action = [&] { return cmd_topo(g); };
  });

  auto* wl = app.add_subcommand("workload", "Workload traces");
  wl->require_subcommand(1);
  auto* gen = wl->add_subcommand("gen", "Generate a synthetic trace");
  std::string gen_horizon, gen_out;
  std::optional<double> rate;
  gen->add_option("--horizon", gen_horizon, "Span of arrivals, e.g. 7d");
  gen->add_option("--rate", rate, "Arrivals per hour");
  gen->add_option("-o,--output", gen_out, "Trace file (default: stdout)");
  gen->callback([&] { action = [&] { return cmd_workload_gen(g, gen_horizon, rate, gen_out); }; });

  auto* sc = app.add_subcommand("submit-check", "Run the submission filter on a job description");
  std::string job_file, rules;
  std::uint32_t active = 0;
  sc->add_option("job", job_file, "key = value job file");
  sc->add_option("--rules", rules, "Print the rules of a partition instead");
  sc->add_option("--active-jobs", active, "Jobs the user already has queued under the same QoS");
  sc->callback([&] { action = [&] { return cmd_submit_check(g, job_file, rules, active); }; });

  auto* fsc = app.add_subcommand("fs", "File-system policy");
  fsc->require_subcommand(1);
  auto* fsr = fsc->add_subcommand("report", "Usage per user or group against quotas");
  std::string inventory, purge_at;
  fsr->add_option("inventory", inventory, "CSV: path,user,group,bytes,atime,fs")->required();
  fsr->add_option("--purge-at", purge_at, "Also list purge candidates at this time");
  fsr->callback([&] { action = [&] { return cmd_fs_report(g, inventory, purge_at); }; });

  auto* lp = app.add_subcommand("lpbm", "Benchmark scoring");
  lp->require_subcommand(1);
  auto* lps = lp->add_subcommand("score", "Score proposals against a reference system");
  std::string results, reference, points;
  lps->add_option("results", results, "CSV: benchmark,system,nodes,metric,direction")->required();
  lps->add_option("--reference", reference, "Reference system results (same format)")->required();
  lps->add_option("--points", points, "Category points per system; adds the weighted ranking");
  lps->callback([&] { action = [&] { return cmd_lpbm(g, results, reference, points); }; });

  auto* rep = app.add_subcommand("report", "Reports over a simulate run");
  std::string jobs_path, bucket = "1d", qsum_at;
  bool util = false, waits = false, locality = false;
  rep->add_option("--jobs", jobs_path, "Job records (default: OUT/jobs.csv)");
  rep->add_flag("--util", util, "Utilization per bucket");
  rep->add_option("--bucket", bucket, "Utilization bucket width")->capture_default_str();
  rep->add_option("--qsum", qsum_at, "Queue summary at this time");
  rep->add_flag("--waits", waits, "Wait-time statistics");
  rep->add_flag("--locality", locality, "Per-job network locality");
  rep->callback([&] { action = [&] { return cmd_report(g, jobs_path, util, bucket, qsum_at, waits, locality); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    for (const auto& err : e.errors()) std::cerr << "config error: " << err << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
