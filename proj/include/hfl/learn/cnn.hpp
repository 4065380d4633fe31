#pragma once

#include <cstdint>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"
#include "hfl/image/augment.hpp"
#include "hfl/image/gray_image.hpp"
#include "hfl/image/preprocess.hpp"
#include "hfl/learn/network.hpp"
#include "hfl/learn/trainer.hpp"

namespace hfl::learn {

// Row-major values with an explicit shape.
template <class T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> values;

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
  void check() const {
    require(values.size() == count(), ErrorKind::ShapeMismatch, "tensor value count differs from its shape");
  }
};

struct ConvBlock {
  int channels = 8;
  int kernel = 3;
  int stride = 2;
  bool operator==(const ConvBlock&) const = default;
};

struct CnnSpec {
  int input_side = 64;
  std::vector<ConvBlock> blocks = {{8, 3, 2}, {16, 3, 2}, {32, 3, 2}};
  std::vector<int> dense = {32};
  bool operator==(const CnnSpec&) const = default;
};

// conv+ReLU blocks, global average pooling, dense+ReLU stack, one linear unit.
inline std::vector<Layer> cnn_layers(const CnnSpec& spec) {
  require(!spec.blocks.empty(), ErrorKind::InvalidArgument, "cnn needs at least one conv block");
  require(spec.input_side >= 1, ErrorKind::InvalidArgument, "input side must be positive");
  std::vector<Layer> layers;
  for (const auto& b : spec.blocks) {
    layers.push_back(Conv2d{b.channels, b.kernel, b.stride, b.kernel / 2});
    layers.push_back(Relu{});
  }
  layers.push_back(GlobalAvgPool{});
  for (int w : spec.dense) {
    layers.push_back(Dense{w, true});
    layers.push_back(Relu{});
  }
  layers.push_back(Dense{1, false});
  return layers;
}

template <class T = float>
struct CnnModel {
  CnnSpec spec;
  Network<T> net;
  std::uint64_t seed = 0;
};

template <class T = float>
CnnModel<T> make_cnn(const CnnSpec& spec, std::uint64_t seed) {
  CnnModel<T> m{spec, Network<T>({1, spec.input_side, spec.input_side}, cnn_layers(spec)), seed};
  m.net.initialize(seed);
  return m;
}

// Predictions for a {B, side, side} or {B, 1, side, side} batch.
template <class T>
std::vector<double> cnn_forward(const CnnModel<T>& model, const Tensor<T>& batch) {
  batch.check();
  const auto s = static_cast<std::size_t>(model.spec.input_side);
  const bool ok = (batch.shape.size() == 3 && batch.shape[1] == s && batch.shape[2] == s) ||
                  (batch.shape.size() == 4 && batch.shape[1] == 1 && batch.shape[2] == s && batch.shape[3] == s);
  require(ok, ErrorKind::ShapeMismatch, "batch shape does not match the cnn input");
  const int B = static_cast<int>(batch.shape[0]);
  Workspace<T> ws;
  ws.acts.resize(1);
  ws.acts[0] = Eigen::Map<const Matrix<T>>(batch.values.data(), 1, static_cast<Eigen::Index>(B * s * s));
  const auto& pred = model.net.forward(ws, B);
  std::vector<double> out(static_cast<std::size_t>(B));
  for (int j = 0; j < B; ++j) out[static_cast<std::size_t>(j)] = static_cast<double>(pred(0, j));
  return out;
}

// Writes normalized (optionally augmented) images into a 1 x (B*side*side) input.
template <class T>
struct ImageFeeder {
  const std::vector<GrayImage>* images;
  AugmentParams augmentation;

  void operator()(const std::vector<std::size_t>& idx, bool augment_batch, Rng& rng, Matrix<T>& out) const {
    const int side = (*images)[idx.front()].width;
    const Eigen::Index S = static_cast<Eigen::Index>(side) * side;
    out.resize(1, S * static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const GrayImage& src = (*images)[idx[k]];
      const ImageTensor t = minmax_normalize(augment_batch ? augment(src, rng, augmentation) : src);
      require(t.side == side, ErrorKind::ShapeMismatch, "images differ in size");
      for (Eigen::Index p = 0; p < S; ++p) out(0, static_cast<Eigen::Index>(k) * S + p) = static_cast<T>(t.values[p]);
    }
  }
};

template <class T = float>
struct CnnTrainResult {
  CnnModel<T> model;
  TrainHistory history;
};

// Fits the cnn to targets from letterboxed images. Initialization uses
// `seed`; the validation split, shuffling and augmentation draw from rng.
template <class T = float>
CnnTrainResult<T> cnn_train(const std::vector<GrayImage>& images, const std::vector<double>& targets,
                            const CnnSpec& spec, const TrainConfig& config, std::uint64_t seed, Rng& rng) {
  require(images.size() == targets.size(), ErrorKind::ShapeMismatch, "one target per image required");
  require(images.size() >= 2, ErrorKind::InvalidArgument, "training needs at least two images");
  for (const auto& img : images)
    require(img.width == spec.input_side && img.height == spec.input_side, ErrorKind::ShapeMismatch,
            "image size differs from the cnn input side");
  CnnTrainResult<T> r{make_cnn<T>(spec, seed), {}};
  r.history = train_network(r.model.net, targets, config, rng, ImageFeeder<T>{&images, config.augmentation});
  return r;
}

template <class T>
std::vector<double> cnn_predict(const CnnModel<T>& model, const std::vector<GrayImage>& images) {
  if (images.empty()) return {};
  std::vector<std::size_t> idx(images.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return predict_all(model.net, idx, ImageFeeder<T>{&images, {}});
}

}  // namespace hfl::learn
