#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"
#include "hfl/image/augment.hpp"
#include "hfl/learn/network.hpp"
#include "hfl/learn/optimizer.hpp"

namespace hfl::learn {

struct TrainConfig {
  OptimizerConfig optimizer;
  int epochs = 60;
  int batch_size = 32;
  int patience = 10;
  double validation_fraction = 0.2;
  // Off only for diagnostics such as memorizing a tiny set.
  bool early_stopping = true;
  bool augment = true;
  AugmentParams augmentation;
};

inline void validate(const TrainConfig& c) {
  require(c.optimizer.learning_rate > 0.0, ErrorKind::ConfigError, "learning rate must be positive");
  require(c.epochs >= 0, ErrorKind::ConfigError, "epochs must be >= 0");
  require(c.batch_size >= 1, ErrorKind::ConfigError, "batch size must be >= 1");
  require(c.patience >= 1, ErrorKind::ConfigError, "patience must be >= 1");
  require(c.validation_fraction > 0.0 && c.validation_fraction < 1.0, ErrorKind::ConfigError,
          "validation fraction must be in (0, 1)");
}

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 0 when no epoch ran
  double best_val_loss = std::numeric_limits<double>::infinity();
  bool stopped_early = false;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;
  bool operator==(const TrainHistory&) const = default;
};

// Random split of 0..n-1 into training and validation positions.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_split(std::size_t n, double fraction,
                                                                                      Rng& rng) {
  require(n >= 2, ErrorKind::InvalidArgument, "training needs at least two samples");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  std::size_t n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  std::vector<std::size_t> val(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());
  return {train, val};
}

// fill(indices, augment, rng, out) writes the network input for those samples
// into out (input.c x indices.size()*input.spatial()).
template <class T, class Fill>
double evaluate_mse(const Network<T>& net, const std::vector<std::size_t>& indices, const std::vector<double>& targets,
                    Fill&& fill, int chunk = 256) {
  require(!indices.empty(), ErrorKind::EmptyInput, "no samples to evaluate");
  Workspace<T> ws;
  ws.acts.resize(1);
  Rng unused(0);
  double sum = 0.0;
  for (std::size_t start = 0; start < indices.size(); start += static_cast<std::size_t>(chunk)) {
    const std::size_t end = std::min(indices.size(), start + static_cast<std::size_t>(chunk));
    const std::vector<std::size_t> part(indices.begin() + static_cast<std::ptrdiff_t>(start),
                                        indices.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<double> y;
    for (auto i : part) y.push_back(targets[i]);
    fill(part, false, unused, ws.acts[0]);
    const auto& pred = net.forward(ws, static_cast<int>(part.size()));
    sum += mse_loss<T>(pred, y, nullptr) * static_cast<double>(part.size());
  }
  return sum / static_cast<double>(indices.size());
}

template <class T, class Fill>
std::vector<double> predict_all(const Network<T>& net, const std::vector<std::size_t>& indices, Fill&& fill,
                                int chunk = 256) {
  Workspace<T> ws;
  ws.acts.resize(1);
  Rng unused(0);
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += static_cast<std::size_t>(chunk)) {
    const std::size_t end = std::min(indices.size(), start + static_cast<std::size_t>(chunk));
    const std::vector<std::size_t> part(indices.begin() + static_cast<std::ptrdiff_t>(start),
                                        indices.begin() + static_cast<std::ptrdiff_t>(end));
    fill(part, false, unused, ws.acts[0]);
    const auto& pred = net.forward(ws, static_cast<int>(part.size()));
    for (Eigen::Index j = 0; j < pred.cols(); ++j) out.push_back(static_cast<double>(pred(0, j)));
  }
  return out;
}

// Minibatch training on squared error with a held-out validation split.
// With early stopping the parameters of the best validation epoch are restored.
// Throws DivergenceError when a loss becomes non-finite.
template <class T, class Fill>
TrainHistory train_network(Network<T>& net, const std::vector<double>& targets, const TrainConfig& config, Rng& rng,
                           Fill&& fill) {
  validate(config);
  for (double t : targets) require(std::isfinite(t), ErrorKind::InvalidArgument, "targets must be finite");
  TrainHistory h;
  std::tie(h.train_indices, h.val_indices) = validation_split(targets.size(), config.validation_fraction, rng);
  if (config.epochs == 0) return h;

  AdamFamily<T> opt(net.param_count(), config.optimizer);
  ParamVector<T> grad(net.param_count());
  ParamVector<T> best = net.params();
  Workspace<T> ws;
  ws.acts.resize(1);
  Matrix<T> gpred;
  std::vector<std::size_t> order = h.train_indices;
  int since_best = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double train_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<double> y;
      for (auto i : batch) y.push_back(targets[i]);
      fill(batch, config.augment, rng, ws.acts[0]);
      const auto& pred = net.forward(ws, static_cast<int>(batch.size()));
      const double loss = mse_loss<T>(pred, y, &gpred);
      if (!std::isfinite(loss)) throw DivergenceError(epoch);
      train_sum += loss * static_cast<double>(batch.size());
      std::fill(grad.begin(), grad.end(), T(0));
      net.backward(ws, gpred, grad);
      opt.step(net.params(), grad);
    }
    EpochRecord rec{epoch, train_sum / static_cast<double>(order.size()), 0.0};
    rec.val_loss = evaluate_mse(net, h.val_indices, targets, fill);
    if (!std::isfinite(rec.val_loss) || !std::isfinite(rec.train_loss)) throw DivergenceError(epoch);
    h.epochs.push_back(rec);
    if (rec.val_loss < h.best_val_loss) {
      h.best_val_loss = rec.val_loss;
      h.best_epoch = epoch;
      best = net.params();
      since_best = 0;
    } else if (++since_best >= config.patience && config.early_stopping) {
      h.stopped_early = true;
      break;
    }
  }
  if (config.early_stopping) net.params() = best;
  return h;
}

}  // namespace hfl::learn
