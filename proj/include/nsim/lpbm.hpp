#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsim::lpbm {

enum class Direction { higher_is_better, lower_is_better };

/// The procurement benchmark suite.
inline constexpr std::array<std::string_view, 7> kBenchmarks = {
    "HPCG", "Nek5000", "WRF", "NAMD", "miniDFT", "SPEC-MPI-2007", "IOR"};

bool is_known_benchmark(std::string_view name);

struct BenchmarkResult {
  std::string benchmark;
  std::string system;
  std::uint32_t nodes = 1;
  double metric = 1.0;
  Direction direction = Direction::higher_is_better;
};

struct ScoreOptions {
  /// SSI-style per-node efficiency: scale each speedup by ref/proposed nodes.
  bool per_node_scaling = false;
  /// Runs on fewer nodes than this are scored but flagged.
  std::uint32_t min_nodes = 100;
};

struct Speedup {
  std::string benchmark;
  double value = 1.0;
};

struct Score {
  double value = 1.0;  // geometric mean of the speedups
  std::vector<Speedup> speedups;
  std::vector<std::string> warnings;
};

/// Geometric mean of per-benchmark speedups of `proposed` over `reference`.
/// Throws std::invalid_argument when the two sets do not cover the same
/// benchmarks or a metric is not positive.
Score lpbm_score(std::span<const BenchmarkResult> proposed,
                 std::span<const BenchmarkResult> reference, const ScoreOptions& options = {});

enum class Category : std::size_t {
  technical_merit,
  energy_efficiency,
  implementation_plan,
  service_warranty,
  vendor_experience,
};
inline constexpr std::size_t kCategoryCount = 5;
std::string_view to_string(Category c);

using CategoryPoints = std::array<double, kCategoryCount>;

struct ScoringWeights {
  double lpbm = 1.0;
  CategoryPoints category{};        // weight per category
  CategoryPoints max_points{10, 10, 10, 10, 10};
};

struct ProposalScoreCard {
  std::string name;
  double lpbm_score = 0.0;
  CategoryPoints points{};
};

/// Weighted sum of the LPBM score and the category points. Throws when a
/// point value lies outside [0, max] or a weight is negative.
double proposal_score(const ProposalScoreCard& card, const ScoringWeights& weights);

struct Ranking {
  std::vector<std::size_t> order;      // indices into the input, best first
  std::vector<double> scores;          // per input index
  std::vector<std::size_t> shortlist;  // first k of order
};

/// Descending by proposal score; equal scores keep submission order.
Ranking rank_proposals(std::span<const ProposalScoreCard> cards, const ScoringWeights& weights,
                       std::size_t shortlist_size = 5);

struct Config {
  ScoringWeights weights;
  std::size_t shortlist = 5;
  ScoreOptions options;
};

/// CSV with header `benchmark,system,nodes,metric,direction`; direction is
/// `higher` or `lower`.
std::vector<BenchmarkResult> parse_results(std::istream& in);
/// CSV with header `system,technical_merit,energy_efficiency,implementation_plan,service_warranty,vendor_experience`.
std::vector<ProposalScoreCard> parse_points(std::istream& in);

}  // namespace nsim::lpbm
