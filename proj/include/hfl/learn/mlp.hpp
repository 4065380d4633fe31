#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/learn/network.hpp"
#include "hfl/learn/trainer.hpp"
#include "hfl/stats/frame.hpp"

namespace hfl::learn {

struct MlpSpec {
  std::vector<int> hidden = {32, 16};
};

// Dense regressor on tabular features. Targets are centered on their training
// mean, which is added back at prediction time.
template <class T = float>
struct MlpModel {
  MlpSpec spec;
  std::vector<std::string> columns;
  Network<T> net;
  double offset = 0.0;
  std::uint64_t seed = 0;
};

inline std::vector<Layer> mlp_layers(const MlpSpec& spec) {
  std::vector<Layer> layers;
  for (int w : spec.hidden) {
    layers.push_back(Dense{w, true});
    layers.push_back(Relu{});
  }
  layers.push_back(Dense{1, false});
  return layers;
}

template <class T>
struct RowFeeder {
  const Eigen::MatrixXd* values;
  void operator()(const std::vector<std::size_t>& idx, bool, Rng&, Matrix<T>& out) const {
    out.resize(values->cols(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
      out.col(static_cast<Eigen::Index>(k)) = values->row(static_cast<Eigen::Index>(idx[k])).transpose().cast<T>();
  }
};

template <class T = float>
std::pair<MlpModel<T>, TrainHistory> mlp_fit(const stats::FeatureFrame& frame, const Eigen::VectorXd& targets,
                                             const MlpSpec& spec, TrainConfig config, std::uint64_t seed, Rng& rng) {
  const std::size_t n = frame.rows();
  require(static_cast<std::size_t>(targets.size()) == n, ErrorKind::ShapeMismatch, "one target per row required");
  require(n >= 2, ErrorKind::InvalidArgument, "mlp needs at least two rows");
  MlpModel<T> m{spec, frame.names, Network<T>({static_cast<int>(frame.cols()), 1, 1}, mlp_layers(spec)), 0.0, seed};
  m.net.initialize(seed);
  m.offset = targets.mean();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = targets(static_cast<Eigen::Index>(i)) - m.offset;
  config.augment = false;
  TrainHistory h = train_network(m.net, y, config, rng, RowFeeder<T>{&frame.values});
  return {std::move(m), std::move(h)};
}

template <class T>
Eigen::VectorXd mlp_predict(const MlpModel<T>& model, const stats::FeatureFrame& frame) {
  require(frame.names == model.columns, ErrorKind::ColumnMismatch, "frame columns differ from the fitted model");
  std::vector<std::size_t> idx(frame.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  if (idx.empty()) return out;
  const auto pred = predict_all(model.net, idx, RowFeeder<T>{&frame.values});
  for (std::size_t i = 0; i < pred.size(); ++i) out(static_cast<Eigen::Index>(i)) = pred[i] + model.offset;
  return out;
}

}  // namespace hfl::learn
