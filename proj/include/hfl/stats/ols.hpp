#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/stats/distributions.hpp"
#include "hfl/stats/frame.hpp"

namespace hfl::stats {

inline constexpr const char* kInterceptName = "(intercept)";
inline constexpr double kRssFloor = 1e-300;

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
};

// Immutable OLS result. coefficients[0] is the intercept.
struct RegressionFit {
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  double rss = 0.0;
  double sigma2 = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double aic = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;  // slope count, excluding the intercept
  std::vector<std::string> dropped;
  std::optional<std::vector<Standardization>> standardization;
  std::optional<TargetLabel> label;

  double intercept() const { return coefficients.front().estimate; }

  const Coefficient& coefficient(const std::string& name) const {
    for (const auto& c : coefficients)
      if (c.name == name) return c;
    fail(ErrorKind::UnknownVariable, "fit has no coefficient '" + name + "'");
  }

  std::vector<std::string> slope_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 1; i < coefficients.size(); ++i) out.push_back(coefficients[i].name);
    return out;
  }
};

struct OlsOptions {
  // Drop exactly collinear columns (reported in RegressionFit::dropped)
  // instead of raising SingularDesign.
  bool drop_collinear = false;
  double rank_tolerance = 1e-10;
};

// Gaussian AIC without the additive constant: n ln(RSS/n) + 2(p + 2).
// RSS is floored at 1e-300 so a perfect fit stays finite.
inline double aic_value(std::size_t n, double rss, std::size_t p) {
  const double nn = static_cast<double>(n);
  return nn * std::log(std::max(rss, kRssFloor) / nn) + 2.0 * (static_cast<double>(p) + 2.0);
}

inline double adjusted_r2_value(double r2, std::size_t n, std::size_t p) {
  const double nn = static_cast<double>(n);
  return 1.0 - (1.0 - r2) * (nn - 1.0) / (nn - static_cast<double>(p) - 1.0);
}

inline double aic(const RegressionFit& fit) { return aic_value(fit.n, fit.rss, fit.p); }
inline double adjusted_r2(const RegressionFit& fit) { return adjusted_r2_value(fit.r2, fit.n, fit.p); }

namespace detail {

// beta0 + sum_j beta_j x_j accumulated in coefficient order. Shared by fitting
// and prediction so in-sample predictions reproduce the stored fitted values.
inline Eigen::VectorXd linear_predict(const std::vector<Coefficient>& coefs,
                                      const std::vector<const double*>& columns, std::size_t n,
                                      std::size_t stride) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double v = coefs[0].estimate;
    for (std::size_t j = 0; j < columns.size(); ++j) v += coefs[j + 1].estimate * columns[j][i * stride];
    out(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

inline std::vector<const double*> column_pointers(const Eigen::MatrixXd& values,
                                                  const std::vector<std::size_t>& order) {
  std::vector<const double*> cols;
  for (auto j : order) cols.push_back(values.data() + static_cast<Eigen::Index>(j) * values.rows());
  return cols;
}

// Design columns (index into [intercept, frame columns...]) that form the
// first exact dependency found by the pivoted QR.
inline std::vector<std::size_t> dependency_set(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                                               Eigen::Index rank, Eigen::Index dependent_pos) {
  const auto& perm = qr.colsPermutation().indices();
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(rank, qr.matrixR().cols()).template triangularView<Eigen::Upper>();
  const Eigen::VectorXd rhs = qr.matrixR().block(0, dependent_pos, rank, 1);
  const Eigen::VectorXd c =
      R.topLeftCorner(rank, rank).template triangularView<Eigen::Upper>().solve(rhs);
  const double scale = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  std::vector<std::size_t> set{static_cast<std::size_t>(perm(dependent_pos))};
  for (Eigen::Index k = 0; k < rank; ++k)
    if (std::abs(c(k)) > 1e-6 * std::max(scale, 1e-300)) set.push_back(static_cast<std::size_t>(perm(k)));
  std::sort(set.begin(), set.end());
  return set;
}

}  // namespace detail

// Ordinary least squares with an intercept, via column-pivoted Householder QR.
// Inference uses the unbiased error variance RSS / (n - p - 1).
inline RegressionFit ols_fit(const FeatureFrame& frame, const Eigen::VectorXd& y, const OlsOptions& options = {}) {
  const std::size_t n = frame.rows();
  require(static_cast<std::size_t>(y.size()) == n, ErrorKind::ShapeMismatch, "target length differs from frame");
  std::vector<std::size_t> active(frame.cols());
  for (std::size_t j = 0; j < active.size(); ++j) active[j] = j;
  std::vector<std::string> dropped;

  auto design_name = [&](std::size_t design_col) {
    return design_col == 0 ? std::string(kInterceptName) : frame.names[active[design_col - 1]];
  };

  for (;;) {
    const std::size_t p = active.size();
    require(n > p + 1, ErrorKind::InvalidArgument,
            "need n > p + 1 (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
    X.col(0).setOnes();
    for (std::size_t j = 0; j < p; ++j) X.col(static_cast<Eigen::Index>(j + 1)) = frame.values.col(static_cast<Eigen::Index>(active[j]));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.rows(), X.cols());
    qr.setThreshold(options.rank_tolerance);
    qr.compute(X);
    const Eigen::Index rank = qr.rank();
    if (rank < X.cols()) {
      const auto set = detail::dependency_set(qr, rank, rank);
      if (!options.drop_collinear) {
        std::vector<std::string> names;
        for (auto c : set) names.push_back(design_name(c));
        throw SingularDesignError(names);
      }
      // Drop the last non-intercept member of the dependency and refit.
      std::size_t victim = 0;
      for (auto c : set)
        if (c != 0) victim = c;
      require(victim != 0, ErrorKind::SingularDesign, "intercept is collinear with nothing droppable");
      dropped.push_back(frame.names[active[victim - 1]]);
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(victim - 1));
      continue;
    }

    const Eigen::VectorXd beta = qr.solve(y);
    RegressionFit fit;
    fit.n = n;
    fit.p = p;
    fit.dropped = dropped;
    fit.standardization = frame.standardization;
    fit.coefficients.resize(p + 1);
    for (std::size_t j = 0; j <= p; ++j) {
      fit.coefficients[j].name = design_name(j);
      fit.coefficients[j].estimate = beta(static_cast<Eigen::Index>(j));
    }

    fit.fitted = detail::linear_predict(fit.coefficients, detail::column_pointers(frame.values, active), n, 1);
    fit.residuals = y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    const double df = static_cast<double>(n) - static_cast<double>(p) - 1.0;
    fit.sigma2 = fit.rss / df;
    const double tss = (y.array() - y.mean()).square().sum();
    fit.r2 = tss > 0.0 ? 1.0 - fit.rss / tss : 1.0;
    fit.adj_r2 = adjusted_r2_value(fit.r2, n, p);
    fit.aic = aic_value(n, fit.rss, p);

    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::Index k = X.cols();
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index a = 0; a < k; ++a) {
      const double var_perm = Rinv.row(a).squaredNorm();
      auto& c = fit.coefficients[static_cast<std::size_t>(perm(a))];
      c.se = std::sqrt(fit.sigma2 * var_perm);
      c.t = c.se > 0.0 ? c.estimate / c.se : (c.estimate == 0.0 ? 0.0 : std::copysign(INFINITY, c.estimate));
      c.p = student_t_two_sided_p(c.t, df);
    }
    return fit;
  }
}

inline RegressionFit ols_fit(const FeatureFrame& frame, const TargetVector& target, const OlsOptions& options = {}) {
  RegressionFit fit = ols_fit(frame, target.values, options);
  fit.label = target.label;
  return fit;
}

// Predictions with columns matched by name.
inline Eigen::VectorXd predict(const RegressionFit& fit, const FeatureFrame& frame) {
  std::vector<std::size_t> order;
  for (std::size_t j = 1; j < fit.coefficients.size(); ++j) {
    const auto idx = frame.find(fit.coefficients[j].name);
    if (!idx) fail(ErrorKind::ColumnMismatch, "frame lacks column '" + fit.coefficients[j].name + "'");
    order.push_back(*idx);
  }
  for (const auto& name : frame.names) {
    const bool known = std::any_of(fit.coefficients.begin() + 1, fit.coefficients.end(),
                                   [&](const Coefficient& c) { return c.name == name; }) ||
                       std::find(fit.dropped.begin(), fit.dropped.end(), name) != fit.dropped.end();
    if (!known) fail(ErrorKind::ColumnMismatch, "fit has no column '" + name + "'");
  }
  return detail::linear_predict(fit.coefficients, detail::column_pointers(frame.values, order), frame.rows(), 1);
}

// Variance inflation factor 1 / (1 - R^2_j) of each column regressed on all others.
inline std::vector<double> vif(const FeatureFrame& frame) {
  require(frame.rows() > frame.cols(), ErrorKind::InvalidArgument, "vif needs n > p");
  std::vector<double> out(frame.cols());
  for (std::size_t j = 0; j < frame.cols(); ++j) {
    const FeatureFrame others = drop_columns(frame, {j});
    const Eigen::VectorXd target = frame.values.col(static_cast<Eigen::Index>(j));
    const RegressionFit aux = ols_fit(others, target);
    if (aux.r2 >= 1.0 - 1e-12) throw SingularDesignError({frame.names[j]});
    out[j] = 1.0 / (1.0 - aux.r2);
  }
  return out;
}

}  // namespace hfl::stats
