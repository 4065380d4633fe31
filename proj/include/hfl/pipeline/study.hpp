#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"
#include "hfl/image/preprocess.hpp"
#include "hfl/market/market.hpp"
#include "hfl/pipeline/benchmark.hpp"
#include "hfl/pipeline/folds.hpp"
#include "hfl/pipeline/stages.hpp"
#include "hfl/pipeline/subsets.hpp"
#include "hfl/stats/descriptive.hpp"
#include "hfl/stats/ols.hpp"

namespace hfl::pipeline {

struct StudyConfig {
  stats::TargetLabel target = stats::TargetLabel::Rent;
  stats::VariableSpec variables;
  int folds = 5;
  int image_side = 64;
  std::uint8_t background_threshold = kDefaultBackgroundThreshold;
  Stage2Config stage2;
  BenchmarkConfig benchmark;
  bool subsets = true;
  bool quadratic_terms = true;
  std::size_t exemplars = 5;
  std::size_t min_subset_size = kMinSubsetSize;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct RobustnessResult {
  stats::Coefficient sentiment_with_quadratics;
  double adj_r2_with_quadratics = 0.0;
  std::vector<std::string> vif_columns;
  std::vector<double> vif;
};

struct StudyReport {
  stats::TargetLabel target = stats::TargetLabel::Rent;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t fold_seed = 0;
  stats::RegressionFit stage1;
  stats::RegressionFit stage3;
  SentimentScores sentiment;
  std::vector<ModelBenchmark> benchmark;
  Exemplars exemplars;
  std::string exemplar_model;
  std::vector<SubsetResult> subsets;
  std::optional<RobustnessResult> robustness;
  std::vector<stats::CcdfPoint> ccdf_rent, ccdf_rpms;
  std::optional<double> sentiment_q_correlation;  // only with generator truth

  const stats::Coefficient& beta1() const { return stage3.coefficient(kSentimentColumn); }
  double aic_difference() const { return stage1.aic - stage3.aic; }
};

using Progress = std::function<void(const std::string&)>;

inline std::vector<GrayImage> prepare_images(const std::vector<GrayImage>& raw, int side, std::uint8_t threshold) {
  std::vector<GrayImage> out;
  out.reserve(raw.size());
  for (const auto& img : raw) out.push_back(prepare_plan(img, side, threshold));
  return out;
}

// Stage 1 -> out-of-fold sentiment -> stage 3 -> benchmark -> exemplars,
// subsets and robustness checks. `images` are raw plans aligned with listings.
inline StudyReport run_study(const std::vector<ListingRecord>& listings, const std::vector<GrayImage>& images,
                             const std::optional<std::vector<ListingTruth>>& truth, const StudyConfig& config,
                             const Progress& progress = {}) {
  auto log = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  require(listings.size() == images.size(), ErrorKind::ShapeMismatch, "one plan image per listing required");
  StudyReport r;
  r.target = config.target;
  r.n = listings.size();
  r.seed = config.seed;

  log("preprocessing " + std::to_string(images.size()) + " plans");
  const std::vector<GrayImage> prepared = prepare_images(images, config.image_side, config.background_threshold);

  const HedonicData base = hedonic_data(listings, config.target, config.variables);
  r.stage1 = stats::ols_fit(base.frame, base.y);
  log("stage 1: r2 " + std::to_string(r.stage1.r2));

  std::vector<std::int64_t> ids;
  for (const auto& l : listings) ids.push_back(l.id);
  r.fold_seed = derive_seed(config.seed, 0xf01d);
  const FoldPlan plan = make_folds(ids, config.folds, r.fold_seed);

  Stage2Config s2 = config.stage2;
  s2.threads = config.threads;
  log("stage 2: training " + std::to_string(plan.k) + " fold models");
  r.sentiment = stage2_oof(prepared, r.stage1.residuals, config.target, plan, s2);

  const HedonicData aug = sentiment_data(listings, r.sentiment, config.target, config.variables);
  r.stage3 = stage3_hedonic(listings, r.sentiment, config.target, config.variables);
  log("stage 3: sentiment coefficient " + std::to_string(r.beta1().estimate) + " p " + std::to_string(r.beta1().p));

  if (truth) {
    std::unordered_map<std::int64_t, double> q;
    for (const auto& t : *truth) q[t.id] = t.q;
    std::vector<double> qs, ss;
    for (std::size_t i = 0; i < r.sentiment.ids.size(); ++i) {
      const auto it = q.find(r.sentiment.ids[i]);
      if (it == q.end()) continue;
      qs.push_back(it->second);
      ss.push_back(r.sentiment.scores[i]);
    }
    if (qs.size() >= 2) r.sentiment_q_correlation = stats::pearson(ss, qs);
  }

  BenchmarkConfig bc = config.benchmark;
  bc.threads = config.threads;
  bc.seed = derive_seed(config.seed, 0xbe7c);
  log("benchmark");
  r.benchmark = benchmark(base, aug, plan, bc);

  if (!r.benchmark.empty() && config.exemplars > 0) {
    const ModelBenchmark* src = &r.benchmark.front();
    for (const auto& b : r.benchmark)
      if (b.model == ModelKind::Ols) src = &b;
    r.exemplar_model = to_string(src->model);
    const std::size_t k = std::min(config.exemplars, listings.size() / 2);
    r.exemplars = rank_exemplars(src->obs.ids, src->obs.pred_with, src->obs.ids, src->obs.pred_without, k);
  }

  if (config.subsets) {
    log("subset analysis");
    r.subsets = subset_analysis(listings, r.sentiment, config.target, plan, median_splits(listings), bc,
                                config.min_subset_size, config.variables);
  }

  if (config.quadratic_terms) {
    RobustnessResult rob;
    stats::FeatureFrame quad = add_quadratic_terms(base.frame);
    const Eigen::VectorXd z = aug.frame.values.col(0);
    stats::FeatureFrame with_sent;
    with_sent.names.push_back(kSentimentColumn);
    with_sent.kinds.push_back(stats::ColumnKind::Continuous);
    with_sent.names.insert(with_sent.names.end(), quad.names.begin(), quad.names.end());
    with_sent.kinds.insert(with_sent.kinds.end(), quad.kinds.begin(), quad.kinds.end());
    with_sent.values.resize(quad.values.rows(), quad.values.cols() + 1);
    with_sent.values.col(0) = z;
    with_sent.values.rightCols(quad.values.cols()) = quad.values;
    const auto fit = stats::ols_fit(with_sent, base.y);
    rob.sentiment_with_quadratics = fit.coefficient(kSentimentColumn);
    rob.adj_r2_with_quadratics = fit.adj_r2;
    rob.vif_columns = aug.frame.names;
    rob.vif = stats::vif(aug.frame);
    r.robustness = rob;
  }

  std::vector<double> rent, rpms;
  for (const auto& l : listings) {
    rent.push_back(l.rent);
    rpms.push_back(l.rpms);
  }
  r.ccdf_rent = stats::ccdf(rent);
  r.ccdf_rpms = stats::ccdf(rpms);
  return r;
}

}  // namespace hfl::pipeline
