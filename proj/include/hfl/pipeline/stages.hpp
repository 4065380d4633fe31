#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"
#include "hfl/image/gray_image.hpp"
#include "hfl/learn/cnn.hpp"
#include "hfl/learn/grid_search.hpp"
#include "hfl/market/market.hpp"
#include "hfl/pipeline/folds.hpp"
#include "hfl/stats/frame.hpp"
#include "hfl/stats/ols.hpp"

namespace hfl::pipeline {

inline constexpr const char* kSentimentColumn = "floor_plan_sentiment";

// Log target and standardized design for a hedonic regression.
struct HedonicData {
  stats::FeatureFrame frame;
  stats::TargetVector y;
};

inline HedonicData hedonic_data(const std::vector<ListingRecord>& listings, stats::TargetLabel label,
                                const stats::VariableSpec& spec = {}) {
  require(!listings.empty(), ErrorKind::EmptyInput, "no listings");
  auto [f, y] = stats::build_frame(listings, spec, label);
  return {std::move(f), std::move(y)};
}

// Stage 1: hedonic OLS; its residuals are the adjusted prices the cnn learns.
inline stats::RegressionFit stage1(const std::vector<ListingRecord>& listings, stats::TargetLabel label,
                                   const stats::VariableSpec& spec = {}) {
  const HedonicData d = hedonic_data(listings, label, spec);
  return stats::ols_fit(d.frame, d.y);
}

// Hyperparameter candidates for the optional nested grid search.
struct GridSpace {
  std::vector<double> learning_rates;
  std::vector<std::vector<int>> dense_stacks;
  std::vector<double> beta1s;
  int inner_folds = 5;
  bool enabled() const { return !learning_rates.empty() || !dense_stacks.empty() || !beta1s.empty(); }
};

struct Stage2Config {
  learn::CnnSpec cnn;
  learn::TrainConfig train;
  GridSpace grid;
  int threads = 1;
};

struct Candidate {
  learn::CnnSpec cnn;
  learn::TrainConfig train;
};

// Lexicographic expansion: learning rate, then dense stack, then beta1.
inline std::vector<Candidate> expand_grid(const Stage2Config& c) {
  const auto lrs = c.grid.learning_rates.empty() ? std::vector<double>{c.train.optimizer.learning_rate}
                                                 : c.grid.learning_rates;
  const auto stacks = c.grid.dense_stacks.empty() ? std::vector<std::vector<int>>{c.cnn.dense} : c.grid.dense_stacks;
  const auto b1s = c.grid.beta1s.empty() ? std::vector<double>{c.train.optimizer.beta1} : c.grid.beta1s;
  std::vector<Candidate> out;
  for (double lr : lrs)
    for (const auto& stack : stacks)
      for (double b1 : b1s) {
        Candidate cand{c.cnn, c.train};
        cand.cnn.dense = stack;
        cand.train.optimizer.learning_rate = lr;
        cand.train.optimizer.beta1 = b1;
        out.push_back(cand);
      }
  return out;
}

struct FoldTraining {
  int fold = 0;
  std::vector<std::int64_t> training_ids;
  double target_offset = 0.0;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  int epochs_run = 0;
  std::size_t chosen_candidate = 0;
  learn::CnnModel<float> model;
  learn::TrainConfig train;
};

// Out-of-fold cnn predictions of the stage-1 residual.
struct SentimentScores {
  stats::TargetLabel label = stats::TargetLabel::Rent;
  std::vector<std::int64_t> ids;
  std::vector<double> scores;
  std::vector<int> fold;
  std::vector<FoldTraining> models;  // one per fold

  double score_of(std::int64_t id) const {
    const auto it = std::find(ids.begin(), ids.end(), id);
    require(it != ids.end(), ErrorKind::InvalidArgument, "no sentiment for id " + std::to_string(id));
    return scores[static_cast<std::size_t>(it - ids.begin())];
  }
};

namespace detail {

template <class T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Stage 2: for each fold f a cnn is fit to the (training-mean centered)
// residuals of the other folds and scores fold f. images and residuals are
// aligned with plan.ids. Seeds derive from (plan.seed, f).
inline SentimentScores stage2_oof(const std::vector<GrayImage>& images, const Eigen::VectorXd& residuals,
                                  stats::TargetLabel label, const FoldPlan& plan, const Stage2Config& config) {
  const std::size_t n = plan.ids.size();
  require(images.size() == n && static_cast<std::size_t>(residuals.size()) == n, ErrorKind::ShapeMismatch,
          "images, residuals and fold plan must be aligned");
  SentimentScores s;
  s.label = label;
  s.ids = plan.ids;
  s.fold = plan.fold;
  s.scores.assign(n, 0.0);
  s.models.resize(static_cast<std::size_t>(plan.k));
  const std::vector<double> resid(residuals.data(), residuals.data() + n);
  const std::vector<Candidate> space = expand_grid(config);

  detail::parallel_for(plan.k, config.threads, [&](int f) {
    const auto train_rows = plan.rows_outside(f);
    const auto test_rows = plan.rows_in(f);
    const std::vector<GrayImage> train_images = detail::pick(images, train_rows);
    std::vector<double> y = detail::pick(resid, train_rows);
    double offset = 0.0;
    for (double v : y) offset += v;
    offset /= static_cast<double>(y.size());
    for (double& v : y) v -= offset;

    const std::uint64_t fold_seed = derive_seed(plan.seed, 0x5732, static_cast<std::uint64_t>(f));
    std::size_t chosen = 0;
    if (config.grid.enabled() && space.size() > 1) {
      const auto result = learn::grid_search(
          space, train_images.size(), config.grid.inner_folds, derive_seed(fold_seed, 1),
          [&](const Candidate& c, const std::vector<std::size_t>& tr, const std::vector<std::size_t>& va) {
            Rng rng(derive_seed(fold_seed, 2));
            const auto fit = learn::cnn_train<float>(detail::pick(train_images, tr), detail::pick(y, tr), c.cnn,
                                                     c.train, derive_seed(fold_seed, 3), rng);
            const auto pred = learn::cnn_predict(fit.model, detail::pick(train_images, va));
            double mse = 0.0;
            for (std::size_t i = 0; i < va.size(); ++i) mse += (pred[i] - y[va[i]]) * (pred[i] - y[va[i]]);
            return mse / static_cast<double>(va.size());
          });
      chosen = result.best;
    }
    Rng rng(derive_seed(fold_seed, 4));
    const auto fit = learn::cnn_train<float>(train_images, y, space[chosen].cnn, space[chosen].train,
                                             derive_seed(fold_seed, 5), rng);
    const auto pred = learn::cnn_predict(fit.model, detail::pick(images, test_rows));
    for (std::size_t i = 0; i < test_rows.size(); ++i) s.scores[test_rows[i]] = pred[i];

    FoldTraining& m = s.models[static_cast<std::size_t>(f)];
    m.fold = f;
    m.training_ids = detail::pick(plan.ids, train_rows);
    m.target_offset = offset;
    m.best_epoch = fit.history.best_epoch;
    m.best_val_loss = fit.history.best_val_loss;
    m.epochs_run = static_cast<int>(fit.history.epochs.size());
    m.chosen_candidate = chosen;
    m.model = fit.model;
    m.train = space[chosen].train;
  });
  return s;
}

// True when no id was scored by a model whose training set contained it.
inline bool leakage_free(const SentimentScores& s) {
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    const auto& train = s.models[static_cast<std::size_t>(s.fold[i])].training_ids;
    if (std::find(train.begin(), train.end(), s.ids[i]) != train.end()) return false;
  }
  return true;
}

// Sentiment values aligned with the listing order.
inline Eigen::VectorXd aligned_sentiment(const std::vector<ListingRecord>& listings, const SentimentScores& s) {
  std::unordered_map<std::int64_t, double> lookup;
  for (std::size_t i = 0; i < s.ids.size(); ++i) lookup[s.ids[i]] = s.scores[i];
  Eigen::VectorXd out(static_cast<Eigen::Index>(listings.size()));
  for (std::size_t i = 0; i < listings.size(); ++i) {
    const auto it = lookup.find(listings[i].id);
    require(it != lookup.end(), ErrorKind::InvalidArgument,
            "no sentiment for listing id " + std::to_string(listings[i].id));
    out(static_cast<Eigen::Index>(i)) = it->second;
  }
  return out;
}

// Hedonic design with the sentiment column first, all columns standardized.
inline HedonicData sentiment_data(const std::vector<ListingRecord>& listings, const SentimentScores& s,
                                  stats::TargetLabel label, const stats::VariableSpec& spec = {}) {
  require(s.label == label, ErrorKind::InvalidArgument,
          std::string("sentiment was trained on ") + to_string(s.label) + " residuals, not " + to_string(label));
  const Eigen::VectorXd sent = aligned_sentiment(listings, s);
  if (sent.size() < 2 || sent.maxCoeff() == sent.minCoeff())
    fail(ErrorKind::CollinearSentiment, "sentiment is constant");
  stats::FeatureFrame raw = stats::drop_constant_dummies(stats::raw_frame(listings, spec));
  stats::FeatureFrame f;
  f.names.push_back(kSentimentColumn);
  f.kinds.push_back(stats::ColumnKind::Continuous);
  f.names.insert(f.names.end(), raw.names.begin(), raw.names.end());
  f.kinds.insert(f.kinds.end(), raw.kinds.begin(), raw.kinds.end());
  f.ids = raw.ids;
  f.values.resize(raw.values.rows(), raw.values.cols() + 1);
  f.values.col(0) = sent;
  f.values.rightCols(raw.values.cols()) = raw.values;
  if (spec.standardize) f = stats::apply_standardizer(f, stats::fit_standardizer(f));
  return {std::move(f), stats::target_vector(listings, label)};
}

// Stage 3: hedonic OLS with the standardized sentiment as an extra regressor.
inline stats::RegressionFit stage3_hedonic(const std::vector<ListingRecord>& listings, const SentimentScores& s,
                                           stats::TargetLabel label, const stats::VariableSpec& spec = {}) {
  const HedonicData d = sentiment_data(listings, s, label, spec);
  try {
    return stats::ols_fit(d.frame, d.y);
  } catch (const SingularDesignError& e) {
    const auto& cols = e.columns();
    if (std::find(cols.begin(), cols.end(), kSentimentColumn) != cols.end())
      fail(ErrorKind::CollinearSentiment, std::string("sentiment is collinear with the design: ") + e.what());
    throw;
  }
}

// Appends the square of every continuous column (named <col>_sq), computed on
// the unstandardized values. A standardized input is restandardized as a whole.
inline stats::FeatureFrame add_quadratic_terms(const stats::FeatureFrame& frame) {
  stats::FeatureFrame raw = frame;
  if (frame.standardization) {
    for (std::size_t j = 0; j < frame.cols(); ++j) {
      const auto& s = (*frame.standardization)[j];
      const double sd = s.sd > 0.0 ? s.sd : 1.0;
      raw.values.col(static_cast<Eigen::Index>(j)) = frame.values.col(static_cast<Eigen::Index>(j)).array() * sd + s.mean;
    }
    raw.standardization.reset();
  }
  stats::FeatureFrame out = raw;
  for (std::size_t j = 0; j < raw.cols(); ++j) {
    if (raw.kinds[j] != stats::ColumnKind::Continuous) continue;
    const Eigen::VectorXd sq = raw.values.col(static_cast<Eigen::Index>(j)).array().square();
    out = stats::append_column(out, raw.names[j] + "_sq", sq);
  }
  if (frame.standardization) out = stats::apply_standardizer(out, stats::fit_standardizer(out));
  return out;
}

}  // namespace hfl::pipeline
