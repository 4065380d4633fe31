#pragma once

#include <cmath>
#include <json.hpp>
#include <string>
#include <vector>

#include "hfl/pipeline/study.hpp"
#include "hfl/stats/descriptive.hpp"

namespace hfl::pipeline {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kCiZ = 1.96;

// Non-finite values become null; JSON has no encoding for them.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const stats::Coefficient& c) {
  return Json{{"name", c.name},
              {"estimate", number(c.estimate)},
              {"se", number(c.se)},
              {"t", number(c.t)},
              {"p", number(c.p)},
              {"ci_low", number(c.estimate - kCiZ * c.se)},
              {"ci_high", number(c.estimate + kCiZ * c.se)}};
}

inline Json to_json(const stats::RegressionFit& fit) {
  Json coefs = Json::array();
  for (const auto& c : fit.coefficients) coefs.push_back(to_json(c));
  Json j{{"coefficients", coefs},
         {"diagnostics",
          {{"n", fit.n},
           {"p", fit.p},
           {"rss", number(fit.rss)},
           {"sigma2", number(fit.sigma2)},
           {"r2", number(fit.r2)},
           {"adj_r2", number(fit.adj_r2)},
           {"aic", number(fit.aic)}}},
         {"dropped", fit.dropped}};
  if (fit.standardization) {
    Json s = Json::array();
    const auto names = fit.slope_names();
    for (std::size_t i = 0; i < fit.standardization->size() && i < names.size(); ++i)
      s.push_back({{"name", names[i]}, {"mean", (*fit.standardization)[i].mean}, {"sd", (*fit.standardization)[i].sd}});
    j["standardization"] = s;
  }
  return j;
}

inline Json to_json(const stats::PairedTest& t) {
  return Json{{"mean_diff", number(t.mean_diff)},
              {"t", number(t.t)},
              {"df", t.df},
              {"p", number(t.p)},
              {"zero_variance", t.zero_variance}};
}

inline Json to_json(const ModelBenchmark& b) {
  Json folds = Json::array();
  for (const auto& f : b.folds) {
    Json fj{{"fold", f.fold},          {"n", f.n},
            {"mse_without", f.mse_without}, {"mse_with", f.mse_with},
            {"mae_without", f.mae_without}, {"mae_with", f.mae_with}};
    if (f.t_sq) fj["t_sq"] = to_json(*f.t_sq);
    folds.push_back(fj);
  }
  return Json{{"model", to_string(b.model)},
              {"folds", folds},
              {"mse_without", b.mse_without},
              {"mse_with", b.mse_with},
              {"mae_without", b.mae_without},
              {"mae_with", b.mae_with},
              {"mse_reduction_pct", number(b.mse_reduction_pct)},
              {"mae_reduction_pct", number(b.mae_reduction_pct)},
              {"t_sq", to_json(b.t_sq)},
              {"t_abs", to_json(b.t_abs)}};
}

inline Json to_json(const std::vector<Adjustment>& a) {
  Json out = Json::array();
  for (const auto& x : a) out.push_back({{"id", x.id}, {"adjustment", x.value}});
  return out;
}

inline Json to_json(const std::vector<stats::CcdfPoint>& pts) {
  Json xs = Json::array(), ps = Json::array();
  for (const auto& p : pts) {
    xs.push_back(p.x);
    ps.push_back(p.p);
  }
  return Json{{"x", xs}, {"p", ps}};
}

inline Json to_json(const StudyReport& r) {
  const auto& b1 = r.beta1();
  Json sentiment{{"column", kSentimentColumn},
                 {"beta1", number(b1.estimate)},
                 {"se", number(b1.se)},
                 {"t", number(b1.t)},
                 {"p", number(b1.p)},
                 {"effect_size_pct", number(stats::effect_size_pct(b1.estimate))}};
  if (r.sentiment_q_correlation) sentiment["corr_planted_q"] = *r.sentiment_q_correlation;

  Json bench = Json::array();
  for (const auto& b : r.benchmark) bench.push_back(to_json(b));

  Json folds = Json::array();
  for (const auto& m : r.sentiment.models)
    folds.push_back({{"fold", m.fold},
                     {"training_n", m.training_ids.size()},
                     {"target_offset", m.target_offset},
                     {"best_epoch", m.best_epoch},
                     {"best_val_loss", number(m.best_val_loss)},
                     {"epochs_run", m.epochs_run},
                     {"chosen_candidate", m.chosen_candidate}});

  Json j{{"target", stats::to_string(r.target)},
         {"n", r.n},
         {"seeds", {{"master", r.seed}, {"folds", r.fold_seed}}},
         {"stage1", to_json(r.stage1)},
         {"stage3", to_json(r.stage3)},
         {"sentiment", sentiment},
         {"diagnostics",
          {{"adj_r2_without", r.stage1.adj_r2},
           {"adj_r2_with", r.stage3.adj_r2},
           {"aic_without", r.stage1.aic},
           {"aic_with", r.stage3.aic},
           {"aic_difference", r.aic_difference()}}},
         {"benchmark", bench},
         {"stage2_folds", folds}};

  if (!r.exemplar_model.empty())
    j["exemplars"] = {{"model", r.exemplar_model},
                      {"positive", to_json(r.exemplars.positive)},
                      {"negative", to_json(r.exemplars.negative)}};

  if (!r.subsets.empty()) {
    Json subs = Json::array();
    for (const auto& s : r.subsets) {
      Json sb = Json::array();
      for (const auto& b : s.benchmark) sb.push_back(to_json(b));
      subs.push_back({{"name", s.name},
                      {"n", s.n},
                      {"sentiment", to_json(s.sentiment)},
                      {"adj_r2_without", s.adj_r2_without},
                      {"adj_r2_with", s.adj_r2_with},
                      {"benchmark", sb}});
    }
    j["subsets"] = subs;
  }

  if (r.robustness) {
    Json vif = Json::array();
    for (std::size_t i = 0; i < r.robustness->vif.size(); ++i)
      vif.push_back({{"name", r.robustness->vif_columns[i]}, {"vif", number(r.robustness->vif[i])}});
    j["robustness"] = {{"quadratic_terms",
                        {{"sentiment", to_json(r.robustness->sentiment_with_quadratics)},
                         {"adj_r2", r.robustness->adj_r2_with_quadratics}}},
                       {"vif", vif}};
  }

  j["ccdf"] = {{"rent", to_json(r.ccdf_rent)}, {"rpms", to_json(r.ccdf_rpms)}};
  return j;
}

}  // namespace hfl::pipeline
