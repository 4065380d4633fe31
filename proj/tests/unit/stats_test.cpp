#include <gtest/gtest.h>

#include <cmath>

#include "hfl/core/random.hpp"
#include "hfl/market/market.hpp"
#include "hfl/stats/descriptive.hpp"
#include "hfl/stats/ols.hpp"
#include "../support/oracles.hpp"

namespace {

using hfl::stats::FeatureFrame;

FeatureFrame frame_of(const Eigen::MatrixXd& m) {
  FeatureFrame f;
  f.values = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    f.names.push_back("x" + std::to_string(j + 1));
    f.kinds.push_back(hfl::stats::ColumnKind::Continuous);
  }
  return f;
}

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
  hfl::Rng rng(seed);
  Eigen::MatrixXd m(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

// Centered, mutually orthogonal columns of equal norm.
Eigen::MatrixXd orthonormal_centered(int n, int p, std::uint64_t seed) {
  Eigen::MatrixXd m = random_matrix(n, p, seed);
  for (int j = 0; j < p; ++j) {
    m.col(j).array() -= m.col(j).mean();
    for (int k = 0; k < j; ++k) m.col(j) -= m.col(k).dot(m.col(j)) * m.col(k);
    m.col(j).normalize();
  }
  return m;
}

std::vector<hfl::ListingRecord> small_market(std::size_t n, std::uint64_t seed = 1) {
  hfl::MarketConfig c;
  c.n_listings = n;
  c.seed = seed;
  return hfl::generate_market(c).listings;
}

TEST(Frame, StandardizedColumnsHaveZeroMeanUnitSd) {
  const auto listings = small_market(400);
  const auto [f, y] = hfl::stats::build_frame(listings, {}, hfl::stats::TargetLabel::Rent);
  ASSERT_TRUE(f.standardization.has_value());
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const Eigen::VectorXd c = f.values.col(static_cast<Eigen::Index>(j));
    EXPECT_NEAR(c.mean(), 0.0, 1e-12) << f.names[j];
    EXPECT_NEAR(hfl::stats::sample_sd(c, c.mean()), 1.0, 1e-12) << f.names[j];
  }
  for (std::size_t i = 0; i < listings.size(); ++i)
    EXPECT_DOUBLE_EQ(y.values(static_cast<Eigen::Index>(i)), std::log(listings[i].rent));
}

TEST(Frame, TwelveDistrictsGiveElevenDummies) {
  const auto listings = small_market(600);
  hfl::stats::VariableSpec spec;
  spec.controls = false;
  const auto f = hfl::stats::raw_frame(listings, spec);
  int dummies = 0;
  for (const auto& name : f.names) dummies += name.rfind("district_", 0) == 0;
  EXPECT_EQ(dummies, 11);
  EXPECT_FALSE(f.find("district_00").has_value());
  EXPECT_EQ(f.cols(), 6u + 11u);
}

TEST(Frame, NonPositiveTargetNamesTheListing) {
  auto listings = small_market(20);
  listings[7].rpms = 0.0;
  try {
    hfl::stats::build_frame(listings, {}, hfl::stats::TargetLabel::Rpms);
    FAIL();
  } catch (const hfl::Error& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::NonPositiveTarget);
    EXPECT_NE(std::string(e.what()).find(std::to_string(listings[7].id)), std::string::npos);
  }
}

TEST(Frame, UnknownVariableIsRejected) {
  hfl::stats::VariableSpec spec;
  spec.explanatory = {"area", "balconies"};
  EXPECT_THROW(hfl::stats::raw_frame(small_market(5), spec), hfl::Error);
}

TEST(Ols, RecoversExactLine) {
  Eigen::MatrixXd x(6, 1);
  x << 0, 1, 2, 3, 4, 5;
  const Eigen::VectorXd y = (2.0 + 3.0 * x.array()).matrix();
  const auto fit = hfl::stats::ols_fit(frame_of(x), y);
  EXPECT_NEAR(fit.intercept(), 2.0, 1e-12);
  EXPECT_NEAR(fit.coefficient("x1").estimate, 3.0, 1e-12);
  EXPECT_NEAR(fit.rss, 0.0, 1e-20);
  EXPECT_DOUBLE_EQ(fit.r2, 1.0);
  EXPECT_TRUE(std::isfinite(fit.aic));
}

TEST(Ols, DuplicateColumnNamesBothMembers) {
  Eigen::MatrixXd x = random_matrix(30, 3, 4);
  x.col(2) = x.col(0);
  try {
    hfl::stats::ols_fit(frame_of(x), Eigen::VectorXd::Ones(30));
    FAIL();
  } catch (const hfl::SingularDesignError& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::SingularDesign);
    const auto& cols = e.columns();
    EXPECT_NE(std::find(cols.begin(), cols.end(), "x1"), cols.end());
    EXPECT_NE(std::find(cols.begin(), cols.end(), "x3"), cols.end());
  }
}

TEST(Ols, DropCollinearReportsDroppedColumn) {
  Eigen::MatrixXd x = random_matrix(30, 3, 4);
  x.col(2) = 2.0 * x.col(0);
  hfl::stats::OlsOptions opt;
  opt.drop_collinear = true;
  const auto fit = hfl::stats::ols_fit(frame_of(x), random_matrix(30, 1, 5).col(0), opt);
  EXPECT_EQ(fit.dropped, std::vector<std::string>{"x3"});
  EXPECT_EQ(fit.p, 2u);
}

TEST(Ols, MatchesNormalEquationsOracle) {
  const Eigen::MatrixXd x = random_matrix(20, 3, 11);
  Eigen::VectorXd y = random_matrix(20, 1, 12).col(0);
  y += 0.5 * x.col(0) - 1.5 * x.col(2);
  const auto fit = hfl::stats::ols_fit(frame_of(x), y);
  const auto ref = hfl::oracle::ols(x, y);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(fit.coefficients[j].estimate, ref.beta[j], 1e-10 * std::max(1.0, std::fabs(ref.beta[j])));
    EXPECT_NEAR(fit.coefficients[j].se, ref.se[j], 1e-10 * ref.se[j]);
    EXPECT_NEAR(fit.coefficients[j].t, ref.t[j], 1e-9 * std::max(1.0, std::fabs(ref.t[j])));
    EXPECT_NEAR(fit.coefficients[j].p, hfl::oracle::t_two_sided_p(ref.t[j], 16), 1e-9);
  }
  EXPECT_NEAR(fit.rss, ref.rss, 1e-10 * ref.rss);
  EXPECT_NEAR(fit.r2, ref.r2, 1e-12);
}

TEST(Ols, ResidualsAreOrthogonalToDesign) {
  const Eigen::MatrixXd x = random_matrix(80, 4, 21);
  const Eigen::VectorXd y = random_matrix(80, 1, 22).col(0);
  const auto fit = hfl::stats::ols_fit(frame_of(x), y);
  EXPECT_NEAR(fit.residuals.sum(), 0.0, 1e-10);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(x.col(j).dot(fit.residuals), 0.0, 1e-10);
}

TEST(Ols, TooFewRowsIsRejected) {
  EXPECT_THROW(hfl::stats::ols_fit(frame_of(random_matrix(3, 2, 1)), Eigen::VectorXd::Ones(3)), hfl::Error);
}

TEST(Predict, TrainingFrameReproducesFittedValuesExactly) {
  const Eigen::MatrixXd x = random_matrix(50, 3, 31);
  const auto f = frame_of(x);
  const auto fit = hfl::stats::ols_fit(f, random_matrix(50, 1, 32).col(0));
  const Eigen::VectorXd pred = hfl::stats::predict(fit, f);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(pred(i), fit.fitted(i));
}

TEST(Predict, ZeroRowGivesIntercept) {
  const auto fit = hfl::stats::ols_fit(frame_of(random_matrix(50, 3, 33)), random_matrix(50, 1, 34).col(0));
  const Eigen::VectorXd pred = hfl::stats::predict(fit, frame_of(Eigen::MatrixXd::Zero(1, 3)));
  EXPECT_EQ(pred(0), fit.intercept());
}

TEST(Predict, MatchesColumnsByName) {
  const Eigen::MatrixXd x = random_matrix(40, 3, 35);
  const auto f = frame_of(x);
  const auto fit = hfl::stats::ols_fit(f, random_matrix(40, 1, 36).col(0));
  FeatureFrame permuted = hfl::stats::drop_columns(f, {0});
  permuted = hfl::stats::append_column(permuted, "x1", x.col(0));
  const Eigen::VectorXd a = hfl::stats::predict(fit, f), b = hfl::stats::predict(fit, permuted);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(a(i), b(i));

  try {
    hfl::stats::predict(fit, hfl::stats::drop_columns(f, {1}));
    FAIL();
  } catch (const hfl::Error& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::ColumnMismatch);
  }
  try {
    hfl::stats::predict(fit, hfl::stats::append_column(f, "extra", x.col(0)));
    FAIL();
  } catch (const hfl::Error& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::ColumnMismatch);
  }
}

TEST(Vif, OrthogonalColumnsGiveOne) {
  const auto v = hfl::stats::vif(frame_of(orthonormal_centered(60, 4, 41)));
  for (double x : v) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Vif, CorrelatedPairMatchesClosedForm) {
  const Eigen::MatrixXd z = orthonormal_centered(100, 2, 42);
  Eigen::MatrixXd x(100, 2);
  x.col(0) = z.col(0);
  x.col(1) = 0.8 * z.col(0) + 0.6 * z.col(1);
  const double rho = hfl::stats::pearson(Eigen::VectorXd(x.col(0)), Eigen::VectorXd(x.col(1)));
  ASSERT_NEAR(rho, 0.8, 1e-12);
  const auto v = hfl::stats::vif(frame_of(x));
  EXPECT_NEAR(v[0], 1.0 / (1.0 - rho * rho), 1e-9);
  EXPECT_NEAR(v[1], 2.7778, 1e-4);
}

TEST(Vif, ExactDependencyIsSingular) {
  Eigen::MatrixXd x = random_matrix(40, 3, 43);
  x.col(2) = x.col(0) + x.col(1);
  EXPECT_THROW(hfl::stats::vif(frame_of(x)), hfl::Error);
}

TEST(Aic, HandComputedValue) {
  EXPECT_NEAR(hfl::stats::aic_value(5, 2.0, 1), 5.0 * std::log(0.4) + 6.0, 1e-12);
  EXPECT_TRUE(std::isfinite(hfl::stats::aic_value(5, 0.0, 1)));
}

TEST(Aic, NoiseColumnUsuallyRaisesAic) {
  int raised = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Eigen::MatrixXd x = random_matrix(200, 3, 1000 + s);
    Eigen::VectorXd y = x.col(0) + random_matrix(200, 1, 2000 + s).col(0);
    const auto base = hfl::stats::ols_fit(frame_of(x.leftCols(2)), y);
    const auto more = hfl::stats::ols_fit(frame_of(x), y);
    EXPECT_LE(more.rss, base.rss);
    raised += more.aic > base.aic;
  }
  EXPECT_GT(raised, 70);
}

TEST(AdjustedR2, EdgeValues) {
  EXPECT_NEAR(hfl::stats::adjusted_r2_value(0.0, 100, 3), -0.03125, 1e-12);
  EXPECT_DOUBLE_EQ(hfl::stats::adjusted_r2_value(1.0, 100, 3), 1.0);
}

TEST(Correlation, MatrixIsSymmetricWithUnitDiagonal) {
  const Eigen::MatrixXd x = random_matrix(50, 3, 51);
  const auto r = hfl::stats::correlation_matrix(frame_of(x));
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(r(i, i), 1.0);
    for (int j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(r(i, j), r(j, i));
      EXPECT_LE(std::fabs(r(i, j)), 1.0);
    }
  }
  const Eigen::VectorXd a = x.col(0), b = x.col(1);
  const double ma = a.mean(), mb = b.mean();
  double sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < 50; ++i) {
    sab += (a(i) - ma) * (b(i) - mb);
    saa += (a(i) - ma) * (a(i) - ma);
    sbb += (b(i) - mb) * (b(i) - mb);
  }
  EXPECT_NEAR(r(0, 1), sab / std::sqrt(saa * sbb), 1e-14);
}

TEST(Correlation, ConstantColumnIsRejected) {
  Eigen::MatrixXd x = random_matrix(10, 2, 52);
  x.col(1).setConstant(3.0);
  try {
    hfl::stats::correlation_matrix(frame_of(x));
    FAIL();
  } catch (const hfl::Error& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::ConstantColumn);
  }
}

TEST(Ccdf, SmallExamples) {
  const auto a = hfl::stats::ccdf({1, 2, 3});
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a[0].p, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(a[1].p, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(a[2].p, 0.0);
  const auto b = hfl::stats::ccdf({5, 5, 5});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_DOUBLE_EQ(b[0].x, 5.0);
  EXPECT_DOUBLE_EQ(b[0].p, 0.0);
  EXPECT_THROW(hfl::stats::ccdf({}), hfl::Error);
}

TEST(Ccdf, MatchesBruteForceCount) {
  hfl::Rng rng(61);
  std::vector<double> v(1000);
  for (auto& x : v) x = std::round(rng.normal() * 20.0) / 4.0;
  const auto c = hfl::stats::ccdf(v);
  double prev_x = -INFINITY, prev_p = 1.0;
  for (const auto& pt : c) {
    EXPECT_GT(pt.x, prev_x);
    EXPECT_LE(pt.p, prev_p);
    const auto above = std::count_if(v.begin(), v.end(), [&](double x) { return x > pt.x; });
    EXPECT_DOUBLE_EQ(pt.p, static_cast<double>(above) / 1000.0);
    prev_x = pt.x;
    prev_p = pt.p;
  }
}

TEST(PairedT, MatchesIntegratedDensity) {
  const std::vector<double> a = {0.1, -0.2, 0.3}, b = {0, 0, 0};
  const auto r = hfl::stats::paired_t_test(a, b);
  const double m = 0.2 / 3.0;
  double ss = 0;
  for (double d : a) ss += (d - m) * (d - m);
  const double t = m / std::sqrt(ss / 2.0 / 3.0);
  EXPECT_NEAR(r.mean_diff, m, 1e-15);
  EXPECT_NEAR(r.t, t, 1e-12);
  EXPECT_DOUBLE_EQ(r.df, 2.0);
  EXPECT_NEAR(r.p, hfl::oracle::t_two_sided_p(t, 2.0), 1e-10);
  EXPECT_NEAR(r.p, 1.0 - std::fabs(t) / std::sqrt(2.0 + t * t), 1e-12);
}

TEST(PairedT, TailProbabilityAcrossDegreesOfFreedom) {
  for (double df : {1.0, 3.0, 7.5, 30.0, 400.0})
    for (double t : {0.0, 0.3, 1.0, 2.5, 6.0})
      EXPECT_NEAR(hfl::stats::student_t_two_sided_p(t, df), hfl::oracle::t_two_sided_p(t, df), 1e-10)
          << "df=" << df << " t=" << t;
}

TEST(PairedT, IdenticalAndConstantDifferences) {
  const std::vector<double> a = {1, 2, 3, 4};
  const auto same = hfl::stats::paired_t_test(a, a);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p, 1.0);
  const auto shift = hfl::stats::paired_t_test({2, 3, 4, 5}, a);
  EXPECT_TRUE(shift.zero_variance);
  EXPECT_TRUE(std::isinf(shift.t));
  EXPECT_GT(shift.t, 0.0);
  EXPECT_EQ(shift.p, 0.0);
}

TEST(Reductions, PercentAndEffectSize) {
  EXPECT_DOUBLE_EQ(hfl::stats::percent_reduction(2.0, 1.5), 25.0);
  EXPECT_DOUBLE_EQ(hfl::stats::percent_reduction(2.0, 2.5), -25.0);
  try {
    hfl::stats::percent_reduction(0.0, 1.0);
    FAIL();
  } catch (const hfl::Error& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::NonPositiveBase);
  }
  EXPECT_NEAR(hfl::stats::effect_size_pct(0.128), 100.0 * (std::exp(0.128) - 1.0), 1e-12);
  EXPECT_DOUBLE_EQ(hfl::stats::effect_size_pct(0.0), 0.0);
}

TEST(Median, EvenAndOdd) {
  EXPECT_DOUBLE_EQ(hfl::stats::median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(hfl::stats::median({4, 1, 3, 2}), 2.5);
}

}  // namespace
