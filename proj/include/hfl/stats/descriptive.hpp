#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/stats/distributions.hpp"
#include "hfl/stats/frame.hpp"

namespace hfl::stats {

inline double mean(const std::vector<double>& v) {
  require(!v.empty(), ErrorKind::EmptyInput, "mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require(a.size() == b.size(), ErrorKind::ShapeMismatch, "correlation of unequal lengths");
  require(a.size() >= 2, ErrorKind::EmptyInput, "correlation needs at least two points");
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum(), sbb = db.square().sum();
  require(saa > 0.0 && sbb > 0.0, ErrorKind::ConstantColumn, "correlation with a constant series");
  return (da * db).sum() / std::sqrt(saa * sbb);
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  // Copies into aligned storage so the result does not depend on the address.
  const Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  return pearson(va, vb);
}

// Pairwise Pearson correlations of the frame columns.
inline Eigen::MatrixXd correlation_matrix(const FeatureFrame& f) {
  const auto p = static_cast<Eigen::Index>(f.cols());
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = f.values.col(j);
    if (f.rows() < 2 || col.maxCoeff() == col.minCoeff())
      fail(ErrorKind::ConstantColumn, "column '" + f.names[static_cast<std::size_t>(j)] + "' is constant");
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) r(i, j) = r(j, i) = pearson(f.values.col(i), f.values.col(j));
  return r;
}

struct CcdfPoint {
  double x;
  double p;  // fraction of the sample strictly above x
};

// Empirical P(X > x) at each distinct value, ascending.
inline std::vector<CcdfPoint> ccdf(std::vector<double> values) {
  require(!values.empty(), ErrorKind::EmptyInput, "ccdf of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[j] == values[i]) ++j;
    out.push_back({values[i], static_cast<double>(n - j) / static_cast<double>(n)});
    i = j;
  }
  return out;
}

struct PairedTest {
  double mean_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool zero_variance = false;
};

// Paired t-test on a - b. Identical samples give t = 0, p = 1; a constant
// non-zero difference gives an infinite t and p = 0.
inline PairedTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), ErrorKind::ShapeMismatch, "paired samples of unequal length");
  require(a.size() >= 2, ErrorKind::EmptyInput, "paired test needs at least two pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  PairedTest r;
  r.df = static_cast<double>(n - 1);
  r.mean_diff = mean(d);
  double ss = 0.0;
  for (double x : d) ss += (x - r.mean_diff) * (x - r.mean_diff);
  const double se = std::sqrt(ss / r.df / static_cast<double>(n));
  if (se == 0.0) {
    if (r.mean_diff == 0.0) return r;
    r.zero_variance = true;
    r.t = std::copysign(INFINITY, r.mean_diff);
    r.p = 0.0;
    return r;
  }
  r.t = r.mean_diff / se;
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

// 100 * (base - new) / base.
inline double percent_reduction(double base, double value) {
  require(base > 0.0, ErrorKind::NonPositiveBase, "percent reduction needs a positive base");
  return 100.0 * (base - value) / base;
}

// Percent change in the untransformed target for a unit change in a log-model regressor.
inline double effect_size_pct(double coefficient) { return 100.0 * std::expm1(coefficient); }

inline double median(std::vector<double> v) {
  require(!v.empty(), ErrorKind::EmptyInput, "median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace hfl::stats
