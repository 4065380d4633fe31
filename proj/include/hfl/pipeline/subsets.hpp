#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/pipeline/benchmark.hpp"
#include "hfl/pipeline/stages.hpp"
#include "hfl/stats/descriptive.hpp"

namespace hfl::pipeline {

inline constexpr std::size_t kMinSubsetSize = 200;

struct SubsetPredicate {
  std::string name;
  std::function<bool(const ListingRecord&)> keep;
};

// Below (< median) and above (>= median) splits on area and year_built.
inline std::vector<SubsetPredicate> median_splits(const std::vector<ListingRecord>& listings) {
  std::vector<double> area, year;
  for (const auto& r : listings) {
    area.push_back(r.area);
    year.push_back(r.year_built);
  }
  const double ma = stats::median(area), my = stats::median(year);
  return {
      {"area_below_median", [ma](const ListingRecord& r) { return r.area < ma; }},
      {"area_above_median", [ma](const ListingRecord& r) { return r.area >= ma; }},
      {"year_built_below_median", [my](const ListingRecord& r) { return r.year_built < my; }},
      {"year_built_above_median", [my](const ListingRecord& r) { return r.year_built >= my; }},
  };
}

struct SubsetResult {
  std::string name;
  std::size_t n = 0;
  stats::Coefficient sentiment;
  double adj_r2_without = 0.0, adj_r2_with = 0.0;
  std::vector<ModelBenchmark> benchmark;
};

// Stage 3 and the benchmark rerun on each subset, reusing the full-sample
// sentiment and fold assignment.
inline std::vector<SubsetResult> subset_analysis(const std::vector<ListingRecord>& listings,
                                                 const SentimentScores& sentiment, stats::TargetLabel label,
                                                 const FoldPlan& plan, const std::vector<SubsetPredicate>& predicates,
                                                 const BenchmarkConfig& config, std::size_t min_size = kMinSubsetSize,
                                                 const stats::VariableSpec& spec = {}) {
  std::vector<SubsetResult> out;
  for (const auto& p : predicates) {
    std::vector<ListingRecord> subset;
    std::vector<std::int64_t> ids;
    for (const auto& r : listings)
      if (p.keep(r)) {
        subset.push_back(r);
        ids.push_back(r.id);
      }
    if (subset.size() < min_size)
      fail(ErrorKind::SubsetTooSmall, "subset '" + p.name + "' has " + std::to_string(subset.size()) +
                                          " listings, fewer than " + std::to_string(min_size));
    SubsetResult res;
    res.name = p.name;
    res.n = subset.size();
    const HedonicData base = hedonic_data(subset, label, spec);
    const HedonicData aug = sentiment_data(subset, sentiment, label, spec);
    const auto fit0 = stats::ols_fit(base.frame, base.y);
    const auto fit1 = stats::ols_fit(aug.frame, aug.y);
    res.sentiment = fit1.coefficient(kSentimentColumn);
    res.adj_r2_without = fit0.adj_r2;
    res.adj_r2_with = fit1.adj_r2;
    res.benchmark = benchmark(base, aug, plan.restrict(ids), config);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace hfl::pipeline
