#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/learn/network.hpp"

namespace hfl::learn {

enum class OptimizerKind { Adam, Nadam };

inline const char* to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "nadam"; }

inline OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "nadam") return OptimizerKind::Nadam;
  fail(ErrorKind::ConfigError, "optimizer must be 'adam' or 'nadam', got '" + s + "'");
}

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Nadam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

// Adam, or Adam with a Nesterov look-ahead on the first moment.
template <class T>
class AdamFamily {
 public:
  AdamFamily(std::size_t n, OptimizerConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {
    require(config.learning_rate >= 0.0, ErrorKind::InvalidArgument, "learning rate must be >= 0");
    require(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0,
            ErrorKind::InvalidArgument, "betas must be in [0, 1)");
  }

  void step(ParamVector<T>& params, const ParamVector<T>& grad) {
    require(params.size() == m_.size() && grad.size() == m_.size(), ErrorKind::ShapeMismatch,
            "optimizer state size differs from parameters");
    ++t_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c1_next = 1.0 - std::pow(b1, static_cast<double>(t_ + 1));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = config_.learning_rate;
    if (lr == 0.0) {
      for (std::size_t k = 0; k < m_.size(); ++k) {
        const double g = grad[k];
        m_[k] = b1 * m_[k] + (1.0 - b1) * g;
        v_[k] = b2 * v_[k] + (1.0 - b2) * g * g;
      }
      return;
    }
    for (std::size_t k = 0; k < m_.size(); ++k) {
      const double g = grad[k];
      m_[k] = b1 * m_[k] + (1.0 - b1) * g;
      v_[k] = b2 * v_[k] + (1.0 - b2) * g * g;
      const double m_hat = config_.kind == OptimizerKind::Nadam
                               ? b1 * m_[k] / c1_next + (1.0 - b1) * g / c1
                               : m_[k] / c1;
      const double v_hat = v_[k] / c2;
      params[k] = static_cast<T>(params[k] - lr * m_hat / (std::sqrt(v_hat) + config_.epsilon));
    }
  }

  long steps() const { return t_; }

 private:
  OptimizerConfig config_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace hfl::learn
