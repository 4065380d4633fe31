#pragma once

#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/learn/checkpoint.hpp"
#include "hfl/market/market.hpp"
#include "hfl/pipeline/study.hpp"

namespace hfl::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;

struct ImageConfig {
  int side = 64;
  int background_threshold = kDefaultBackgroundThreshold;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 1;
  std::string out;
  MarketConfig market;
  ImageConfig image;
  std::vector<stats::TargetLabel> targets = {stats::TargetLabel::Rent};
  stats::VariableSpec variables;
  int folds = 5;
  pipeline::Stage2Config stage2;
  pipeline::BenchmarkConfig benchmark;
  bool subsets = true;
  bool quadratic_terms = true;
  int exemplars = 5;
  int min_subset_size = static_cast<int>(pipeline::kMinSubsetSize);
};

namespace detail {

// Reads the keys of one JSON object and rejects anything it did not consume.
class Block {
 public:
  Block(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::ConfigError, where() + "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::ConfigError, "'" + qualified(key) + "' has the wrong type");
    }
  }

  Block sub(const char* key) {
    seen_.insert(key);
    return Block(j_.at(key), qualified(key));
  }

  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(ErrorKind::ConfigError, "unknown key '" + qualified(it.key()) + "'");
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "" : "'" + path_ + "': "; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read_train(Block& b, learn::TrainConfig& t) {
  std::string opt = learn::to_string(t.optimizer.kind);
  b.get("optimizer", opt);
  t.optimizer.kind = learn::parse_optimizer(opt);
  b.get("learning_rate", t.optimizer.learning_rate);
  b.get("beta1", t.optimizer.beta1);
  b.get("beta2", t.optimizer.beta2);
  b.get("epsilon", t.optimizer.epsilon);
  b.get("epochs", t.epochs);
  b.get("batch_size", t.batch_size);
  b.get("patience", t.patience);
  b.get("validation_fraction", t.validation_fraction);
  b.get("early_stopping", t.early_stopping);
}

inline std::vector<pipeline::ModelKind> parse_models(const std::vector<std::string>& names) {
  require(!names.empty(), ErrorKind::ConfigError, "model list is empty");
  std::vector<pipeline::ModelKind> out;
  for (const auto& n : names) {
    const auto m = pipeline::parse_model(n);
    if (std::find(out.begin(), out.end(), m) != out.end()) fail(ErrorKind::ConfigError, "model '" + n + "' listed twice");
    out.push_back(m);
  }
  return out;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  require(c.schema_version == kConfigSchemaVersion, ErrorKind::ConfigError,
          "unsupported schema_version " + std::to_string(c.schema_version));
  validate(c.market);
  require(c.image.side >= 8, ErrorKind::ConfigError, "image.side must be >= 8");
  require(c.image.background_threshold >= 0 && c.image.background_threshold <= 255, ErrorKind::ConfigError,
          "image.background_threshold must be in [0, 255]");
  require(!c.targets.empty(), ErrorKind::ConfigError, "stage1.targets is empty");
  require(c.folds >= 2, ErrorKind::ConfigError, "stage2.folds must be >= 2");
  require(!c.stage2.cnn.blocks.empty(), ErrorKind::ConfigError, "stage2.blocks is empty");
  for (const auto& b : c.stage2.cnn.blocks)
    require(b.channels > 0 && b.kernel > 0 && b.stride > 0, ErrorKind::ConfigError, "stage2.blocks entries must be positive");
  learn::validate(c.stage2.train);
  learn::validate(c.benchmark.gbt);
  learn::validate(c.benchmark.mlp_train);
  require(c.exemplars >= 0, ErrorKind::ConfigError, "report.exemplars must be >= 0");
  require(c.min_subset_size >= 1, ErrorKind::ConfigError, "report.min_subset_size must be >= 1");
}

// Every block and key is optional; missing entries keep their defaults.
inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig c;
  detail::Block root(j, "");
  root.get("schema_version", c.schema_version);
  root.get("seed", c.seed);
  root.get("out", c.out);

  if (root.has("market")) {
    auto b = root.sub("market");
    auto& m = c.market;
    b.get("n_listings", m.n_listings);
    b.get("intercept", m.intercept);
    b.get("beta_structural", m.beta_structural);
    b.get("district_effect_scale", m.district_effect_scale);
    b.get("control_effect_scale", m.control_effect_scale);
    b.get("gamma_layout", m.gamma_layout);
    b.get("noise_sigma", m.noise_sigma);
    b.get("gamma_small_boost", m.gamma_small_boost);
    b.get("gamma_old_boost", m.gamma_old_boost);
    b.get("small_area_below", m.small_area_below);
    b.get("old_year_below", m.old_year_below);
    b.get("n_districts", m.n_districts);
    b.get("n_controls", m.n_controls);
    b.get("control_probability", m.control_probability);
    b.get("raster_size", m.raster_size);
    b.finish();
  }
  if (root.has("image")) {
    auto b = root.sub("image");
    b.get("side", c.image.side);
    b.get("background_threshold", c.image.background_threshold);
    b.finish();
  }
  if (root.has("stage1")) {
    auto b = root.sub("stage1");
    if (b.has("targets")) {
      std::vector<std::string> names;
      b.get("targets", names);
      c.targets.clear();
      for (const auto& n : names) c.targets.push_back(stats::parse_target(n));
    }
    b.get("explanatory", c.variables.explanatory);
    b.get("districts", c.variables.districts);
    b.get("controls", c.variables.controls);
    b.finish();
  }
  if (root.has("stage2")) {
    auto b = root.sub("stage2");
    b.get("folds", c.folds);
    if (b.has("blocks")) {
      const auto& arr = b.raw("blocks");
      if (!arr.is_array()) fail(ErrorKind::ConfigError, "'stage2.blocks' must be an array");
      c.stage2.cnn.blocks.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        detail::Block e(arr[i], "stage2.blocks[" + std::to_string(i) + "]");
        learn::ConvBlock cb;
        e.get("channels", cb.channels);
        e.get("kernel", cb.kernel);
        e.get("stride", cb.stride);
        e.finish();
        c.stage2.cnn.blocks.push_back(cb);
      }
    }
    b.get("dense", c.stage2.cnn.dense);
    detail::read_train(b, c.stage2.train);
    b.get("augment", c.stage2.train.augment);
    b.get("p_mirror", c.stage2.train.augmentation.p_mirror);
    b.get("max_angle", c.stage2.train.augmentation.max_angle);
    if (b.has("grid")) {
      auto g = b.sub("grid");
      g.get("learning_rates", c.stage2.grid.learning_rates);
      g.get("dense_stacks", c.stage2.grid.dense_stacks);
      g.get("beta1s", c.stage2.grid.beta1s);
      g.get("inner_folds", c.stage2.grid.inner_folds);
      g.finish();
    }
    b.finish();
  }
  if (root.has("benchmark")) {
    auto b = root.sub("benchmark");
    if (b.has("models")) {
      std::vector<std::string> names;
      b.get("models", names);
      c.benchmark.models = detail::parse_models(names);
    }
    b.get("per_fold_tests", c.benchmark.per_fold_tests);
    if (b.has("gbt")) {
      auto g = b.sub("gbt");
      g.get("trees", c.benchmark.gbt.trees);
      g.get("max_depth", c.benchmark.gbt.max_depth);
      g.get("shrinkage", c.benchmark.gbt.shrinkage);
      g.get("min_samples_leaf", c.benchmark.gbt.min_samples_leaf);
      g.finish();
    }
    if (b.has("mlp")) {
      auto m = b.sub("mlp");
      m.get("hidden", c.benchmark.mlp.hidden);
      detail::read_train(m, c.benchmark.mlp_train);
      m.finish();
    }
    b.finish();
  }
  if (root.has("report")) {
    auto b = root.sub("report");
    b.get("subsets", c.subsets);
    b.get("quadratic_terms", c.quadratic_terms);
    b.get("exemplars", c.exemplars);
    b.get("min_subset_size", c.min_subset_size);
    b.finish();
  }
  root.finish();
  validate(c);
  return c;
}

inline RunConfig parse_config_text(const std::string& text, const std::string& origin = "config") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ConfigError, origin + ": " + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace detail {

inline Json train_json(const learn::TrainConfig& t, bool with_augmentation) {
  Json j = learn::to_json(t);
  if (!with_augmentation) {
    j.erase("augment");
    j.erase("p_mirror");
    j.erase("max_angle");
  }
  return j;
}

}  // namespace detail

// Full effective configuration, in the same shape parse_config accepts.
// Paths and thread counts are left out so reports do not depend on them.
inline Json to_json(const RunConfig& c) {
  const auto& m = c.market;
  Json market{{"n_listings", m.n_listings},
              {"intercept", m.intercept},
              {"beta_structural", m.beta_structural},
              {"district_effect_scale", m.district_effect_scale},
              {"control_effect_scale", m.control_effect_scale},
              {"gamma_layout", m.gamma_layout},
              {"noise_sigma", m.noise_sigma},
              {"gamma_small_boost", m.gamma_small_boost},
              {"gamma_old_boost", m.gamma_old_boost},
              {"small_area_below", m.small_area_below},
              {"old_year_below", m.old_year_below},
              {"n_districts", m.n_districts},
              {"n_controls", m.n_controls},
              {"control_probability", m.control_probability},
              {"raster_size", m.raster_size}};

  Json targets = Json::array();
  for (auto t : c.targets) targets.push_back(stats::to_string(t));

  Json blocks = Json::array();
  for (const auto& b : c.stage2.cnn.blocks) blocks.push_back({{"channels", b.channels}, {"kernel", b.kernel}, {"stride", b.stride}});
  Json stage2{{"folds", c.folds}, {"blocks", blocks}, {"dense", c.stage2.cnn.dense}};
  stage2.update(detail::train_json(c.stage2.train, true));
  stage2["grid"] = {{"learning_rates", c.stage2.grid.learning_rates},
                    {"dense_stacks", c.stage2.grid.dense_stacks},
                    {"beta1s", c.stage2.grid.beta1s},
                    {"inner_folds", c.stage2.grid.inner_folds}};

  Json models = Json::array();
  for (auto k : c.benchmark.models) models.push_back(pipeline::to_string(k));
  Json mlp{{"hidden", c.benchmark.mlp.hidden}};
  mlp.update(detail::train_json(c.benchmark.mlp_train, false));
  Json bench{{"models", models},
             {"per_fold_tests", c.benchmark.per_fold_tests},
             {"gbt",
              {{"trees", c.benchmark.gbt.trees},
               {"max_depth", c.benchmark.gbt.max_depth},
               {"shrinkage", c.benchmark.gbt.shrinkage},
               {"min_samples_leaf", c.benchmark.gbt.min_samples_leaf}}},
             {"mlp", mlp}};

  return Json{{"schema_version", c.schema_version},
              {"seed", c.seed},
              {"market", market},
              {"image", {{"side", c.image.side}, {"background_threshold", c.image.background_threshold}}},
              {"stage1",
               {{"targets", targets},
                {"explanatory", c.variables.explanatory},
                {"districts", c.variables.districts},
                {"controls", c.variables.controls}}},
              {"stage2", stage2},
              {"benchmark", bench},
              {"report",
               {{"subsets", c.subsets},
                {"quadratic_terms", c.quadratic_terms},
                {"exemplars", c.exemplars},
                {"min_subset_size", c.min_subset_size}}}};
}

inline pipeline::StudyConfig study_config(const RunConfig& c, stats::TargetLabel target, int threads) {
  pipeline::StudyConfig s;
  s.target = target;
  s.folds = c.folds;
  s.image_side = c.image.side;
  s.background_threshold = static_cast<std::uint8_t>(c.image.background_threshold);
  s.variables = c.variables;
  s.stage2 = c.stage2;
  s.stage2.cnn.input_side = c.image.side;
  s.benchmark = c.benchmark;
  s.subsets = c.subsets;
  s.quadratic_terms = c.quadratic_terms;
  s.exemplars = static_cast<std::size_t>(c.exemplars);
  s.min_subset_size = static_cast<std::size_t>(c.min_subset_size);
  s.seed = c.seed;
  s.threads = threads;
  return s;
}

}  // namespace hfl::cli
