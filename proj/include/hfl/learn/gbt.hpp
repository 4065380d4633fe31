#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/stats/frame.hpp"

namespace hfl::learn {

struct GbtConfig {
  int trees = 200;
  int max_depth = 3;
  double shrinkage = 0.1;
  int min_samples_leaf = 1;
};

inline void validate(const GbtConfig& c) {
  require(c.trees >= 0, ErrorKind::ConfigError, "tree count must be >= 0");
  require(c.max_depth >= 1, ErrorKind::ConfigError, "tree depth must be >= 1");
  require(c.shrinkage > 0.0 && c.shrinkage <= 1.0, ErrorKind::ConfigError, "shrinkage must be in (0, 1]");
  require(c.min_samples_leaf >= 1, ErrorKind::ConfigError, "min_samples_leaf must be >= 1");
}

// Internal nodes send x[feature] <= threshold left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const double* row, Eigen::Index stride) const {
    int k = 0;
    while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(k)];
      k = row[n.feature * stride] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
  }
};

struct GbtModel {
  GbtConfig config;
  std::vector<std::string> columns;
  double initial = 0.0;
  std::vector<RegressionTree> trees;
  std::vector<double> train_loss;  // training MSE after 0, 1, ..., trees rounds
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

namespace detail {

// Best variance-reduction split of `rows` (marked in `in_node`) scanning each
// feature in ascending value order. Ties keep the lowest feature, then the
// lowest threshold.
inline SplitChoice best_split(const Eigen::MatrixXd& X, const std::vector<double>& r,
                              const std::vector<std::vector<std::size_t>>& sorted, const std::vector<char>& in_node,
                              std::size_t count, double sum, int min_leaf) {
  SplitChoice best;
  const double base = sum * sum / static_cast<double>(count);
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    double left_sum = 0.0;
    std::size_t left_n = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t row : sorted[static_cast<std::size_t>(f)]) {
      if (!in_node[row]) continue;
      const double x = X(static_cast<Eigen::Index>(row), f);
      if (have_prev && x > prev && left_n >= static_cast<std::size_t>(min_leaf) &&
          count - left_n >= static_cast<std::size_t>(min_leaf)) {
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                            right_sum * right_sum / static_cast<double>(count - left_n) - base;
        if (gain > best.gain) best = {static_cast<int>(f), prev + (x - prev) / 2.0, gain};
      }
      left_sum += r[row];
      ++left_n;
      prev = x;
      have_prev = true;
    }
  }
  return best;
}

inline int grow(RegressionTree& tree, const Eigen::MatrixXd& X, const std::vector<double>& r,
                const std::vector<std::vector<std::size_t>>& sorted, std::vector<char>& in_node,
                const std::vector<std::size_t>& rows, int depth, const GbtConfig& c) {
  double sum = 0.0;
  for (auto i : rows) sum += r[i];
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  tree.nodes.back().value = sum / static_cast<double>(rows.size());
  if (depth >= c.max_depth || rows.size() < 2 * static_cast<std::size_t>(c.min_samples_leaf)) return id;

  for (auto i : rows) in_node[i] = 1;
  const SplitChoice s = best_split(X, r, sorted, in_node, rows.size(), sum, c.min_samples_leaf);
  for (auto i : rows) in_node[i] = 0;
  if (s.feature < 0 || !(s.gain > 0.0)) return id;

  std::vector<std::size_t> left, right;
  for (auto i : rows) (X(static_cast<Eigen::Index>(i), s.feature) <= s.threshold ? left : right).push_back(i);
  const int l = grow(tree, X, r, sorted, in_node, left, depth + 1, c);
  const int rr = grow(tree, X, r, sorted, in_node, right, depth + 1, c);
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = s.feature;
  node.threshold = s.threshold;
  node.left = l;
  node.right = rr;
  return id;
}

}  // namespace detail

// Squared-loss gradient boosting with exact greedy splits.
inline GbtModel gbt_fit(const stats::FeatureFrame& frame, const Eigen::VectorXd& y, const GbtConfig& config = {}) {
  validate(config);
  const std::size_t n = frame.rows();
  require(static_cast<std::size_t>(y.size()) == n, ErrorKind::ShapeMismatch, "one target per row required");
  require(n >= 2, ErrorKind::InvalidArgument, "gbt needs at least two rows");
  const Eigen::MatrixXd& X = frame.values;

  GbtModel m;
  m.config = config;
  m.columns = frame.names;
  m.initial = y.mean();
  std::vector<double> F(n, m.initial), r(n);
  auto loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (y(static_cast<Eigen::Index>(i)) - F[i]) * (y(static_cast<Eigen::Index>(i)) - F[i]);
    return s / static_cast<double>(n);
  };
  m.train_loss.push_back(loss());

  std::vector<std::vector<std::size_t>> sorted(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& idx = sorted[static_cast<std::size_t>(f)];
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return X(static_cast<Eigen::Index>(a), f) < X(static_cast<Eigen::Index>(b), f);
    });
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<char> in_node(n, 0);

  for (int t = 0; t < config.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) r[i] = y(static_cast<Eigen::Index>(i)) - F[i];
    RegressionTree tree;
    detail::grow(tree, X, r, sorted, in_node, all, 0, config);
    for (std::size_t i = 0; i < n; ++i)
      F[i] += config.shrinkage * tree.predict(X.data() + static_cast<Eigen::Index>(i), X.rows());
    m.trees.push_back(std::move(tree));
    m.train_loss.push_back(loss());
  }
  return m;
}

inline Eigen::VectorXd gbt_predict(const GbtModel& m, const stats::FeatureFrame& frame) {
  require(frame.names == m.columns, ErrorKind::ColumnMismatch, "frame columns differ from the fitted model");
  Eigen::VectorXd out(frame.values.rows());
  for (Eigen::Index i = 0; i < frame.values.rows(); ++i) {
    double v = m.initial;
    for (const auto& t : m.trees) v += m.config.shrinkage * t.predict(frame.values.data() + i, frame.values.rows());
    out(i) = v;
  }
  return out;
}

}  // namespace hfl::learn
