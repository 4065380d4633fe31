#pragma once

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/format.hpp"
#include "hfl/learn/cnn.hpp"
#include "hfl/learn/trainer.hpp"

namespace hfl::learn {

using Json = nlohmann::ordered_json;

inline constexpr int kCheckpointVersion = 1;

inline Json to_json(const CnnSpec& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks) blocks.push_back({{"channels", b.channels}, {"kernel", b.kernel}, {"stride", b.stride}});
  return Json{{"input_side", s.input_side}, {"blocks", blocks}, {"dense", s.dense}};
}

inline Json to_json(const OptimizerConfig& o) {
  return Json{{"optimizer", to_string(o.kind)},
              {"learning_rate", o.learning_rate},
              {"beta1", o.beta1},
              {"beta2", o.beta2},
              {"epsilon", o.epsilon}};
}

inline Json to_json(const TrainConfig& c) {
  Json j = to_json(c.optimizer);
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["patience"] = c.patience;
  j["validation_fraction"] = c.validation_fraction;
  j["early_stopping"] = c.early_stopping;
  j["augment"] = c.augment;
  j["p_mirror"] = c.augmentation.p_mirror;
  j["max_angle"] = c.augmentation.max_angle;
  return j;
}

inline const char* layer_type(const Layer& l) {
  return std::visit(
      [](const auto& x) -> const char* {
        using L = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<L, Conv2d>) return "conv2d";
        else if constexpr (std::is_same_v<L, Relu>) return "relu";
        else if constexpr (std::is_same_v<L, GlobalAvgPool>) return "global_avg_pool";
        else return "dense";
      },
      l);
}

inline Json shape_json(const Shape& s) { return Json::array({s.c, s.h, s.w}); }

// Spec, per-layer shapes, flat parameters at 9 significant digits, seed and
// the training configuration that produced the weights.
template <class T>
Json checkpoint_json(const CnnModel<T>& model, const TrainConfig& train) {
  const auto& net = model.net;
  Json layers = Json::array();
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    Json values = Json::array();
    const std::size_t off = net.offset(i), cnt = net.param_count(i);
    for (std::size_t k = 0; k < cnt; ++k) values.push_back(quantize_g9(static_cast<double>(net.params()[off + k])));
    layers.push_back({{"type", layer_type(net.layers()[i])},
                      {"input", shape_json(net.shapes()[i])},
                      {"output", shape_json(net.shapes()[i + 1])},
                      {"params", values}});
  }
  return Json{{"checkpoint_version", kCheckpointVersion},
              {"spec", to_json(model.spec)},
              {"layers", layers},
              {"seed", model.seed},
              {"train", to_json(train)}};
}

inline CnnSpec cnn_spec_from_json(const Json& j) {
  try {
    CnnSpec s;
    s.input_side = j.at("input_side").get<int>();
    s.blocks.clear();
    for (const auto& b : j.at("blocks"))
      s.blocks.push_back({b.at("channels").get<int>(), b.at("kernel").get<int>(), b.at("stride").get<int>()});
    s.dense = j.at("dense").get<std::vector<int>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaMismatch, std::string("bad cnn spec: ") + e.what());
  }
}

template <class T = float>
CnnModel<T> load_checkpoint(const Json& j) {
  try {
    require(j.at("checkpoint_version").get<int>() == kCheckpointVersion, ErrorKind::SchemaMismatch,
            "unsupported checkpoint version");
    const CnnSpec spec = cnn_spec_from_json(j.at("spec"));
    CnnModel<T> m{spec, Network<T>({1, spec.input_side, spec.input_side}, cnn_layers(spec)), j.at("seed").get<std::uint64_t>()};
    const auto& layers = j.at("layers");
    require(layers.size() == m.net.layers().size(), ErrorKind::SchemaMismatch, "checkpoint layer count differs from spec");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      require(l.at("type").get<std::string>() == layer_type(m.net.layers()[i]) &&
                  l.at("input") == shape_json(m.net.shapes()[i]) && l.at("output") == shape_json(m.net.shapes()[i + 1]),
              ErrorKind::SchemaMismatch, "checkpoint layer " + std::to_string(i) + " does not match the spec");
      const auto& v = l.at("params");
      require(v.size() == m.net.param_count(i), ErrorKind::SchemaMismatch,
              "checkpoint layer " + std::to_string(i) + " has the wrong parameter count");
      for (std::size_t k = 0; k < v.size(); ++k) m.net.params()[m.net.offset(i) + k] = static_cast<T>(v[k].get<double>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaMismatch, std::string("bad checkpoint: ") + e.what());
  }
}

template <class T>
void save_checkpoint(const std::string& path, const CnnModel<T>& model, const TrainConfig& train) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out << checkpoint_json(model, train).dump(1) << '\n';
  if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

template <class T = float>
CnnModel<T> read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot read " + path);
  try {
    return load_checkpoint<T>(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::SchemaMismatch, path + ": " + e.what());
  }
}

}  // namespace hfl::learn
