#include "nsim/lpbm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nsim::lpbm {

bool is_known_benchmark(std::string_view name) {
  return std::find(kBenchmarks.begin(), kBenchmarks.end(), name) != kBenchmarks.end();
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::technical_merit: return "technical_merit";
    case Category::energy_efficiency: return "energy_efficiency";
    case Category::implementation_plan: return "implementation_plan";
    case Category::service_warranty: return "service_warranty";
    case Category::vendor_experience: return "vendor_experience";
  }
  return "?";
}

namespace {

std::map<std::string, const BenchmarkResult*> by_benchmark(std::span<const BenchmarkResult> results,
                                                          const char* which) {
  std::map<std::string, const BenchmarkResult*> out;
  for (const auto& r : results) {
    if (!is_known_benchmark(r.benchmark))
      throw std::invalid_argument(std::string(which) + ": unknown benchmark '" + r.benchmark + "'");
    if (!(r.metric > 0) || !std::isfinite(r.metric))
      throw std::invalid_argument(std::string(which) + ": metric for " + r.benchmark +
                                  " must be positive");
    if (r.nodes < 1) throw std::invalid_argument(std::string(which) + ": nodes must be >= 1");
    if (!out.emplace(r.benchmark, &r).second)
      throw std::invalid_argument(std::string(which) + ": duplicate result for " + r.benchmark);
  }
  return out;
}

}  // namespace

Score lpbm_score(std::span<const BenchmarkResult> proposed,
                 std::span<const BenchmarkResult> reference, const ScoreOptions& options) {
  const auto prop = by_benchmark(proposed, "proposed");
  const auto ref = by_benchmark(reference, "reference");
  if (prop.empty()) throw std::invalid_argument("lpbm_score: no benchmark results");
  for (const auto& [name, r] : ref)
    if (!prop.count(name)) throw std::invalid_argument("lpbm_score: missing proposed result for " + name);

  Score score;
  double log_sum = 0.0;
  for (const auto& [name, p] : prop) {
    auto it = ref.find(name);
    if (it == ref.end()) throw std::invalid_argument("lpbm_score: missing reference result for " + name);
    const BenchmarkResult& r = *it->second;
    if (p->direction != r.direction)
      throw std::invalid_argument("lpbm_score: direction mismatch for " + name);
    double s = p->direction == Direction::higher_is_better ? p->metric / r.metric : r.metric / p->metric;
    if (options.per_node_scaling) s *= static_cast<double>(r.nodes) / static_cast<double>(p->nodes);
    if (p->nodes < options.min_nodes) {
      score.warnings.push_back(name + " ran on " + std::to_string(p->nodes) + " nodes (minimum " +
                               std::to_string(options.min_nodes) + ")");
    }
    score.speedups.push_back({name, s});
    log_sum += std::log(s);
  }
  score.value = std::exp(log_sum / static_cast<double>(score.speedups.size()));
  return score;
}

double proposal_score(const ProposalScoreCard& card, const ScoringWeights& weights) {
  if (weights.lpbm < 0) throw std::invalid_argument("proposal_score: negative LPBM weight");
  double total = weights.lpbm * card.lpbm_score;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const auto name = to_string(static_cast<Category>(c));
    if (weights.category[c] < 0)
      throw std::invalid_argument("proposal_score: negative weight for " + std::string(name));
    if (!(card.points[c] >= 0 && card.points[c] <= weights.max_points[c]))
      throw std::invalid_argument(card.name + ": " + std::string(name) + " points outside [0, max]");
    total += weights.category[c] * card.points[c];
  }
  return total;
}

Ranking rank_proposals(std::span<const ProposalScoreCard> cards, const ScoringWeights& weights,
                       std::size_t shortlist_size) {
  if (cards.empty()) throw std::invalid_argument("rank_proposals: no proposals");
  Ranking r;
  r.scores.reserve(cards.size());
  for (const auto& c : cards) r.scores.push_back(proposal_score(c, weights));
  r.order.resize(cards.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  r.shortlist.assign(r.order.begin(),
                     r.order.begin() + static_cast<std::ptrdiff_t>(std::min(shortlist_size, r.order.size())));
  return r;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

template <class Fn>
void for_each_row(std::istream& in, std::size_t columns, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header) {
      header = false;
      continue;
    }
    auto f = split_csv(line);
    if (f.size() != columns)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(columns) + " fields");
    fn(f, lineno);
  }
}

}  // namespace

std::vector<BenchmarkResult> parse_results(std::istream& in) {
  std::vector<BenchmarkResult> out;
  for_each_row(in, 5, [&](const std::vector<std::string>& f, std::size_t line) {
    BenchmarkResult r;
    r.benchmark = f[0];
    r.system = f[1];
    const double nodes = to_double(f[2], line);
    if (nodes < 1) throw std::invalid_argument("line " + std::to_string(line) + ": nodes must be >= 1");
    r.nodes = static_cast<std::uint32_t>(nodes);
    r.metric = to_double(f[3], line);
    if (f[4] == "higher")
      r.direction = Direction::higher_is_better;
    else if (f[4] == "lower")
      r.direction = Direction::lower_is_better;
    else
      throw std::invalid_argument("line " + std::to_string(line) + ": direction must be higher or lower");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ProposalScoreCard> parse_points(std::istream& in) {
  std::vector<ProposalScoreCard> out;
  for_each_row(in, 1 + kCategoryCount, [&](const std::vector<std::string>& f, std::size_t line) {
    ProposalScoreCard c;
    c.name = f[0];
    for (std::size_t i = 0; i < kCategoryCount; ++i) c.points[i] = to_double(f[i + 1], line);
    out.push_back(std::move(c));
  });
  return out;
}

}  // namespace nsim::lpbm
