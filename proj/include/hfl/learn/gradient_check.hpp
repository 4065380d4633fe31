#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/learn/network.hpp"

namespace hfl::learn {

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t worst_param = 0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Analytic gradients of the squared-error loss against central differences,
// one parameter at a time. Relative error is |a - n| / max(|a|, |n|, floor).
inline GradientCheck gradient_check(Network<double> net, const Matrix<double>& input, int batch,
                                    const std::vector<double>& targets, double epsilon = 1e-5,
                                    double floor = 1e-7) {
  require(epsilon > 0.0, ErrorKind::InvalidArgument, "epsilon must be positive");
  Workspace<double> ws;
  ws.acts.assign(1, input);
  Matrix<double> gpred;
  mse_loss<double>(net.forward(ws, batch), targets, &gpred);
  ParamVector<double> grad(net.param_count(), 0.0);
  net.backward(ws, gpred, grad);

  auto loss_at = [&] {
    ws.acts.resize(1);
    ws.acts[0] = input;
    return mse_loss<double>(net.forward(ws, batch), targets, nullptr);
  };
  GradientCheck r;
  r.analytic.assign(grad.begin(), grad.end());
  r.numeric.resize(grad.size());
  auto& theta = net.params();
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + epsilon;
    const double up = loss_at();
    theta[k] = saved - epsilon;
    const double down = loss_at();
    theta[k] = saved;
    r.numeric[k] = (up - down) / (2.0 * epsilon);
    const double a = r.analytic[k], n = r.numeric[k];
    const double rel = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
    if (rel > r.max_relative_error) {
      r.max_relative_error = rel;
      r.worst_param = k;
    }
  }
  return r;
}

}  // namespace hfl::learn
