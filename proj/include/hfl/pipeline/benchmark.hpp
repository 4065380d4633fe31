#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"
#include "hfl/learn/gbt.hpp"
#include "hfl/learn/mlp.hpp"
#include "hfl/pipeline/folds.hpp"
#include "hfl/pipeline/stages.hpp"
#include "hfl/stats/descriptive.hpp"
#include "hfl/stats/ols.hpp"

namespace hfl::pipeline {

enum class ModelKind { Ols, Gbt, Mlp };

inline const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Ols: return "ols";
    case ModelKind::Gbt: return "gbt";
    default: return "mlp";
  }
}

inline ModelKind parse_model(const std::string& s) {
  if (s == "ols") return ModelKind::Ols;
  if (s == "gbt") return ModelKind::Gbt;
  if (s == "mlp") return ModelKind::Mlp;
  fail(ErrorKind::ConfigError, "unknown model '" + s + "' (expected ols, gbt or mlp)");
}

inline learn::TrainConfig default_mlp_training() {
  learn::TrainConfig c;
  c.epochs = 200;
  c.batch_size = 32;
  c.patience = 10;
  c.augment = false;
  return c;
}

struct BenchmarkConfig {
  std::vector<ModelKind> models = {ModelKind::Ols, ModelKind::Gbt, ModelKind::Mlp};
  learn::GbtConfig gbt;
  learn::MlpSpec mlp;
  learn::TrainConfig mlp_train = default_mlp_training();
  // Also run a paired test inside every fold.
  bool per_fold_tests = false;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct FoldErrors {
  int fold = 0;
  std::size_t n = 0;
  double mse_without = 0.0, mse_with = 0.0;
  double mae_without = 0.0, mae_with = 0.0;
  std::optional<stats::PairedTest> t_sq;
};

// Per-observation out-of-fold predictions and errors on the log target.
struct ObservationErrors {
  std::vector<std::int64_t> ids;
  std::vector<int> fold;
  std::vector<double> pred_without, pred_with;
  std::vector<double> sq_without, sq_with, abs_without, abs_with;
};

struct ModelBenchmark {
  ModelKind model = ModelKind::Ols;
  std::vector<FoldErrors> folds;
  // Means of the per-fold values.
  double mse_without = 0.0, mse_with = 0.0, mae_without = 0.0, mae_with = 0.0;
  double mse_reduction_pct = 0.0, mae_reduction_pct = 0.0;
  // Paired tests on pooled per-observation errors, without minus with.
  stats::PairedTest t_sq, t_abs;
  ObservationErrors obs;
};

namespace detail {

inline double fold_mean(const std::vector<FoldErrors>& folds, double FoldErrors::*field) {
  double s = 0.0;
  for (const auto& f : folds) s += f.*field;
  return s / static_cast<double>(folds.size());
}

// Out-of-fold predictions of one model on one design.
inline std::vector<double> oof_predictions(ModelKind model, const stats::FeatureFrame& frame,
                                           const Eigen::VectorXd& y, const FoldPlan& plan,
                                           const BenchmarkConfig& config, int f) {
  const auto train = plan.rows_outside(f);
  const auto test = plan.rows_in(f);
  const stats::FeatureFrame xtr = stats::select_rows(frame, train);
  const stats::FeatureFrame xte = stats::select_rows(frame, test);
  const Eigen::VectorXd ytr = stats::select_rows(y, train);
  Eigen::VectorXd pred;
  switch (model) {
    case ModelKind::Ols: {
      stats::OlsOptions opt;
      opt.drop_collinear = true;
      pred = stats::predict(stats::ols_fit(xtr, ytr, opt), xte);
      break;
    }
    case ModelKind::Gbt:
      pred = learn::gbt_predict(learn::gbt_fit(xtr, ytr, config.gbt), xte);
      break;
    case ModelKind::Mlp: {
      // Identical seeds with and without the sentiment column.
      const std::uint64_t s = derive_seed(config.seed, 0x4d4c50, static_cast<std::uint64_t>(f));
      Rng rng(derive_seed(s, 1));
      const auto fit = learn::mlp_fit<float>(xtr, ytr, config.mlp, config.mlp_train, derive_seed(s, 2), rng);
      pred = learn::mlp_predict(fit.first, xte);
      break;
    }
  }
  return std::vector<double>(pred.data(), pred.data() + pred.size());
}

}  // namespace detail

// k-fold comparison of each model without and with the sentiment column.
// `base` and `augmented` are aligned with plan.ids and share the target y.
inline std::vector<ModelBenchmark> benchmark(const HedonicData& base, const HedonicData& augmented,
                                             const FoldPlan& plan, const BenchmarkConfig& config) {
  const std::size_t n = plan.ids.size();
  require(base.frame.rows() == n && augmented.frame.rows() == n, ErrorKind::ShapeMismatch,
          "designs and fold plan must be aligned");
  std::vector<ModelBenchmark> out;
  for (ModelKind model : config.models) {
    ModelBenchmark b;
    b.model = model;
    std::vector<std::vector<double>> without(static_cast<std::size_t>(plan.k)), with(static_cast<std::size_t>(plan.k));
    detail::parallel_for(plan.k, config.threads, [&](int f) {
      without[static_cast<std::size_t>(f)] = detail::oof_predictions(model, base.frame, base.y.values, plan, config, f);
      with[static_cast<std::size_t>(f)] = detail::oof_predictions(model, augmented.frame, augmented.y.values, plan, config, f);
    });

    auto& o = b.obs;
    o.ids = plan.ids;
    o.fold = plan.fold;
    for (auto* v : {&o.pred_without, &o.pred_with, &o.sq_without, &o.sq_with, &o.abs_without, &o.abs_with})
      v->assign(n, 0.0);
    for (int f = 0; f < plan.k; ++f) {
      const auto rows = plan.rows_in(f);
      FoldErrors fe;
      fe.fold = f;
      fe.n = rows.size();
      std::vector<double> fold_sq_without, fold_sq_with;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t i = rows[r];
        const double y = base.y.values(static_cast<Eigen::Index>(i));
        o.pred_without[i] = without[static_cast<std::size_t>(f)][r];
        o.pred_with[i] = with[static_cast<std::size_t>(f)][r];
        const double e0 = y - o.pred_without[i], e1 = y - o.pred_with[i];
        o.sq_without[i] = e0 * e0;
        o.sq_with[i] = e1 * e1;
        o.abs_without[i] = std::abs(e0);
        o.abs_with[i] = std::abs(e1);
        fe.mse_without += o.sq_without[i];
        fe.mse_with += o.sq_with[i];
        fe.mae_without += o.abs_without[i];
        fe.mae_with += o.abs_with[i];
        fold_sq_without.push_back(o.sq_without[i]);
        fold_sq_with.push_back(o.sq_with[i]);
      }
      const double nn = static_cast<double>(rows.size());
      fe.mse_without /= nn;
      fe.mse_with /= nn;
      fe.mae_without /= nn;
      fe.mae_with /= nn;
      if (config.per_fold_tests && rows.size() >= 2) fe.t_sq = stats::paired_t_test(fold_sq_without, fold_sq_with);
      b.folds.push_back(fe);
    }
    b.mse_without = detail::fold_mean(b.folds, &FoldErrors::mse_without);
    b.mse_with = detail::fold_mean(b.folds, &FoldErrors::mse_with);
    b.mae_without = detail::fold_mean(b.folds, &FoldErrors::mae_without);
    b.mae_with = detail::fold_mean(b.folds, &FoldErrors::mae_with);
    b.mse_reduction_pct = stats::percent_reduction(b.mse_without, b.mse_with);
    b.mae_reduction_pct = stats::percent_reduction(b.mae_without, b.mae_with);
    b.t_sq = stats::paired_t_test(o.sq_without, o.sq_with);
    b.t_abs = stats::paired_t_test(o.abs_without, o.abs_with);
    out.push_back(std::move(b));
  }
  return out;
}

inline std::vector<ModelBenchmark> benchmark(const std::vector<ListingRecord>& listings, const SentimentScores& s,
                                             stats::TargetLabel label, const FoldPlan& plan,
                                             const BenchmarkConfig& config, const stats::VariableSpec& spec = {}) {
  require(listings.size() == plan.ids.size(), ErrorKind::ShapeMismatch, "fold plan does not cover the listings");
  for (std::size_t i = 0; i < listings.size(); ++i)
    require(listings[i].id == plan.ids[i], ErrorKind::ShapeMismatch, "fold plan order differs from listings");
  return benchmark(hedonic_data(listings, label, spec), sentiment_data(listings, s, label, spec), plan, config);
}

struct Adjustment {
  std::int64_t id = 0;
  double value = 0.0;
  bool operator==(const Adjustment&) const = default;
};

struct Exemplars {
  std::vector<Adjustment> positive;  // largest pred_with - pred_without first
  std::vector<Adjustment> negative;  // most negative first
};

// Listings whose predicted price moves most when the sentiment is added.
// Ties go to the smaller id.
inline Exemplars rank_exemplars(const std::vector<std::int64_t>& ids_with, const std::vector<double>& pred_with,
                                const std::vector<std::int64_t>& ids_without, const std::vector<double>& pred_without,
                                std::size_t k) {
  if (ids_with != ids_without || pred_with.size() != ids_with.size() || pred_without.size() != ids_without.size())
    fail(ErrorKind::MisalignedPredictions, "prediction sets cover different listings");
  require(2 * k <= ids_with.size(), ErrorKind::InvalidArgument, "need 2k <= n exemplar candidates");
  std::vector<Adjustment> adj;
  for (std::size_t i = 0; i < ids_with.size(); ++i) adj.push_back({ids_with[i], pred_with[i] - pred_without[i]});
  Exemplars e;
  auto desc = adj;
  std::sort(desc.begin(), desc.end(), [](const Adjustment& a, const Adjustment& b) {
    return a.value != b.value ? a.value > b.value : a.id < b.id;
  });
  auto asc = adj;
  std::sort(asc.begin(), asc.end(), [](const Adjustment& a, const Adjustment& b) {
    return a.value != b.value ? a.value < b.value : a.id < b.id;
  });
  e.positive.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(k));
  e.negative.assign(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(k));
  return e;
}

}  // namespace hfl::pipeline
