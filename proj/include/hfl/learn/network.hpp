#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"

namespace hfl::learn {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Flat parameter and gradient storage. Aligned so vectorized kernels see the
// same layout on every run, which keeps results bit-reproducible.
template <class T>
using ParamVector = std::vector<T, Eigen::aligned_allocator<T>>;

// Per-sample activation shape. A batch of B samples is stored as a
// c x (B*h*w) column-major matrix: column b*h*w + y*w + x holds the c channel
// values of pixel (x, y) of sample b.
struct Shape {
  int c = 1, h = 1, w = 1;
  int spatial() const { return h * w; }
  int size() const { return c * h * w; }
  bool operator==(const Shape&) const = default;
};

// Weights are out_c x (kernel*kernel*in_c), column index (ky*kernel + kx)*in_c + ci.
struct Conv2d {
  int out_c = 1, kernel = 3, stride = 1, pad = 1;
};
struct Relu {};
struct GlobalAvgPool {};
// Weights are out x in.
struct Dense {
  int out = 1;
  bool rectified = true;  // followed by a ReLU (selects He initialization)
};

using Layer = std::variant<Conv2d, Relu, GlobalAvgPool, Dense>;

inline const char* layer_name(const Layer& l) {
  switch (l.index()) {
    case 0: return "conv2d";
    case 1: return "relu";
    case 2: return "global_avg_pool";
    default: return "dense";
  }
}

inline Shape output_shape(const Layer& layer, const Shape& in) {
  if (auto* c = std::get_if<Conv2d>(&layer)) {
    require(c->kernel >= 1 && c->stride >= 1 && c->pad >= 0 && c->out_c >= 1, ErrorKind::InvalidArgument,
            "bad conv parameters");
    const int h = (in.h + 2 * c->pad - c->kernel) / c->stride + 1;
    const int w = (in.w + 2 * c->pad - c->kernel) / c->stride + 1;
    require(h >= 1 && w >= 1, ErrorKind::ShapeMismatch, "conv output would be empty");
    return {c->out_c, h, w};
  }
  if (std::holds_alternative<Relu>(layer)) return in;
  if (std::holds_alternative<GlobalAvgPool>(layer)) return {in.c, 1, 1};
  const auto& d = std::get<Dense>(layer);
  require(in.spatial() == 1, ErrorKind::ShapeMismatch, "dense layer needs a flat input");
  require(d.out >= 1, ErrorKind::InvalidArgument, "dense width must be positive");
  return {d.out, 1, 1};
}

inline std::size_t param_count(const Layer& layer, const Shape& in) {
  if (auto* c = std::get_if<Conv2d>(&layer))
    return static_cast<std::size_t>(c->out_c) * (static_cast<std::size_t>(c->kernel * c->kernel * in.c) + 1);
  if (auto* d = std::get_if<Dense>(&layer)) return static_cast<std::size_t>(d->out) * (static_cast<std::size_t>(in.c) + 1);
  return 0;
}

// Scratch buffers for one forward/backward pass. Not shared between threads.
template <class T>
struct Workspace {
  std::vector<Matrix<T>> acts;  // acts[0] is the input, acts[i+1] the output of layer i
  std::vector<Matrix<T>> cols;  // im2col buffers for conv layers
  Matrix<T> grad_a, grad_b;
  int batch = 0;
};

// Feed-forward stack with all parameters in one flat vector.
template <class T>
class Network {
 public:
  Network() = default;

  Network(Shape input, std::vector<Layer> layers) : input_(input), layers_(std::move(layers)) {
    require(!layers_.empty(), ErrorKind::InvalidArgument, "network needs at least one layer");
    shapes_.push_back(input_);
    std::size_t offset = 0;
    for (const auto& l : layers_) {
      offsets_.push_back(offset);
      offset += learn::param_count(l, shapes_.back());
      shapes_.push_back(learn::output_shape(l, shapes_.back()));
    }
    params_.assign(offset, T(0));
  }

  const Shape& input_shape() const { return input_; }
  const Shape& output_shape() const { return shapes_.back(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const std::vector<Shape>& shapes() const { return shapes_; }
  std::size_t offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t param_count() const { return params_.size(); }
  std::size_t param_count(std::size_t layer) const { return learn::param_count(layers_[layer], shapes_[layer]); }
  ParamVector<T>& params() { return params_; }
  const ParamVector<T>& params() const { return params_; }

  // He normal for rectified layers, 1/sqrt(fan_in) otherwise; zero biases.
  void initialize(std::uint64_t seed) {
    Rng rng(seed);
    std::fill(params_.begin(), params_.end(), T(0));
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const Shape& in = shapes_[i];
      std::size_t fan_in = 0, weights = 0;
      bool rectified = true;
      if (auto* c = std::get_if<Conv2d>(&layers_[i])) {
        fan_in = static_cast<std::size_t>(c->kernel * c->kernel * in.c);
        weights = fan_in * static_cast<std::size_t>(c->out_c);
      } else if (auto* d = std::get_if<Dense>(&layers_[i])) {
        fan_in = static_cast<std::size_t>(in.c);
        weights = fan_in * static_cast<std::size_t>(d->out);
        rectified = d->rectified;
      } else {
        continue;
      }
      const double sd = std::sqrt((rectified ? 2.0 : 1.0) / static_cast<double>(fan_in));
      for (std::size_t k = 0; k < weights; ++k) params_[offsets_[i] + k] = static_cast<T>(sd * rng.normal());
    }
  }

  template <class U>
  Network<U> cast() const {
    Network<U> out(input_, layers_);
    for (std::size_t k = 0; k < params_.size(); ++k) out.params()[k] = static_cast<U>(params_[k]);
    return out;
  }

  // Runs the stack on ws.acts[0] (input_.c x batch*spatial); returns the final activation.
  const Matrix<T>& forward(Workspace<T>& ws, int batch) const {
    require(ws.acts.size() >= 1 && ws.acts[0].rows() == input_.c &&
                ws.acts[0].cols() == static_cast<Eigen::Index>(batch) * input_.spatial(),
            ErrorKind::ShapeMismatch, "input batch does not match the network input shape");
    ws.batch = batch;
    ws.acts.resize(layers_.size() + 1);
    ws.cols.resize(layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i) forward_layer(i, ws);
    return ws.acts.back();
  }

  // Accumulates parameter gradients of sum(grad_out .* output) into grad.
  void backward(Workspace<T>& ws, const Matrix<T>& grad_out, ParamVector<T>& grad) const {
    grad.resize(params_.size(), T(0));
    Matrix<T>* g = &ws.grad_a;
    Matrix<T>* g_next = &ws.grad_b;
    *g = grad_out;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      backward_layer(i, ws, *g, i > 0 ? g_next : nullptr, grad);
      std::swap(g, g_next);
    }
  }

 private:
  using Map = Eigen::Map<Matrix<T>>;
  using ConstMap = Eigen::Map<const Matrix<T>>;
  using VecMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;
  using ConstVecMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

  void forward_layer(std::size_t i, Workspace<T>& ws) const {
    const Shape& in = shapes_[i];
    const Shape& out = shapes_[i + 1];
    const Matrix<T>& x = ws.acts[i];
    Matrix<T>& y = ws.acts[i + 1];
    const int B = ws.batch;
    const T* theta = params_.data() + offsets_[i];
    const Layer& layer = layers_[i];
    if (auto* c = std::get_if<Conv2d>(&layer)) {
      const int K = c->kernel * c->kernel * in.c;
      Matrix<T>& cols = ws.cols[i];
      im2col(*c, in, out, x, B, cols);
      ConstMap W(theta, c->out_c, K);
      ConstVecMap b(theta + static_cast<std::ptrdiff_t>(c->out_c) * K, c->out_c);
      y.noalias() = W * cols;
      y.colwise() += b;
    } else if (std::holds_alternative<Relu>(layer)) {
      y = x.cwiseMax(T(0));
    } else if (std::holds_alternative<GlobalAvgPool>(layer)) {
      const int S = in.spatial();
      y.resize(in.c, B);
      for (int s = 0; s < B; ++s) y.col(s) = x.middleCols(static_cast<Eigen::Index>(s) * S, S).rowwise().sum() / T(S);
    } else {
      const auto& d = std::get<Dense>(layer);
      ConstMap W(theta, d.out, in.c);
      ConstVecMap b(theta + static_cast<std::ptrdiff_t>(d.out) * in.c, d.out);
      y.noalias() = W * x;
      y.colwise() += b;
    }
  }

  void backward_layer(std::size_t i, Workspace<T>& ws, const Matrix<T>& gy, Matrix<T>* gx,
                      ParamVector<T>& grad) const {
    const Shape& in = shapes_[i];
    const Shape& out = shapes_[i + 1];
    const Matrix<T>& x = ws.acts[i];
    const int B = ws.batch;
    const T* theta = params_.data() + offsets_[i];
    T* dtheta = grad.data() + offsets_[i];
    const Layer& layer = layers_[i];
    if (auto* c = std::get_if<Conv2d>(&layer)) {
      const int K = c->kernel * c->kernel * in.c;
      const Matrix<T>& cols = ws.cols[i];
      Map dW(dtheta, c->out_c, K);
      VecMap db(dtheta + static_cast<std::ptrdiff_t>(c->out_c) * K, c->out_c);
      dW.noalias() += gy * cols.transpose();
      db += gy.rowwise().sum();
      if (gx) {
        ConstMap W(theta, c->out_c, K);
        Matrix<T>& dcols = ws.cols[i];  // forward buffer is no longer needed
        Matrix<T> tmp = W.transpose() * gy;
        dcols.swap(tmp);
        col2im(*c, in, out, dcols, B, *gx);
      }
    } else if (std::holds_alternative<Relu>(layer)) {
      if (gx) *gx = (x.array() > T(0)).select(gy, T(0));
    } else if (std::holds_alternative<GlobalAvgPool>(layer)) {
      if (gx) {
        const int S = in.spatial();
        gx->resize(in.c, static_cast<Eigen::Index>(B) * S);
        for (int s = 0; s < B; ++s)
          gx->middleCols(static_cast<Eigen::Index>(s) * S, S) = (gy.col(s) / T(S)).replicate(1, S);
      }
    } else {
      const auto& d = std::get<Dense>(layer);
      Map dW(dtheta, d.out, in.c);
      VecMap db(dtheta + static_cast<std::ptrdiff_t>(d.out) * in.c, d.out);
      dW.noalias() += gy * x.transpose();
      db += gy.rowwise().sum();
      if (gx) {
        ConstMap W(theta, d.out, in.c);
        gx->noalias() = W.transpose() * gy;
      }
    }
  }

  static void im2col(const Conv2d& c, const Shape& in, const Shape& out, const Matrix<T>& x, int B,
                     Matrix<T>& cols) {
    const int K = c.kernel * c.kernel * in.c;
    cols.resize(K, static_cast<Eigen::Index>(B) * out.spatial());
    const T* src = x.data();
    T* dst = cols.data();
    for (int s = 0; s < B; ++s)
      for (int oy = 0; oy < out.h; ++oy)
        for (int ox = 0; ox < out.w; ++ox) {
          for (int ky = 0; ky < c.kernel; ++ky) {
            const int iy = oy * c.stride - c.pad + ky;
            for (int kx = 0; kx < c.kernel; ++kx) {
              const int ix = ox * c.stride - c.pad + kx;
              if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w) {
                std::fill(dst, dst + in.c, T(0));
              } else {
                const T* p = src + (static_cast<std::ptrdiff_t>(s) * in.spatial() + iy * in.w + ix) * in.c;
                std::copy(p, p + in.c, dst);
              }
              dst += in.c;
            }
          }
        }
    (void)K;
  }

  static void col2im(const Conv2d& c, const Shape& in, const Shape& out, const Matrix<T>& dcols, int B,
                     Matrix<T>& gx) {
    gx.setZero(in.c, static_cast<Eigen::Index>(B) * in.spatial());
    T* dst = gx.data();
    const T* src = dcols.data();
    for (int s = 0; s < B; ++s)
      for (int oy = 0; oy < out.h; ++oy)
        for (int ox = 0; ox < out.w; ++ox) {
          for (int ky = 0; ky < c.kernel; ++ky) {
            const int iy = oy * c.stride - c.pad + ky;
            for (int kx = 0; kx < c.kernel; ++kx) {
              const int ix = ox * c.stride - c.pad + kx;
              if (iy >= 0 && iy < in.h && ix >= 0 && ix < in.w) {
                T* p = dst + (static_cast<std::ptrdiff_t>(s) * in.spatial() + iy * in.w + ix) * in.c;
                for (int ch = 0; ch < in.c; ++ch) p[ch] += src[ch];
              }
              src += in.c;
            }
          }
        }
  }

  Shape input_;
  std::vector<Layer> layers_;
  std::vector<Shape> shapes_;
  std::vector<std::size_t> offsets_;
  ParamVector<T> params_;
};

// Mean squared error over a 1 x B prediction row and its gradient.
template <class T>
double mse_loss(const Matrix<T>& pred, const std::vector<double>& targets, Matrix<T>* grad) {
  const Eigen::Index B = pred.cols();
  require(static_cast<std::size_t>(B) == targets.size() && pred.rows() == 1, ErrorKind::ShapeMismatch,
          "prediction and target counts differ");
  double loss = 0.0;
  if (grad) grad->resize(1, B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const double e = static_cast<double>(pred(0, j)) - targets[static_cast<std::size_t>(j)];
    loss += e * e;
    if (grad) (*grad)(0, j) = static_cast<T>(2.0 * e / static_cast<double>(B));
  }
  return loss / static_cast<double>(B);
}

}  // namespace hfl::learn
