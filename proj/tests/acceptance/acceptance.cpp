// Acceptance suite. Run with criterion numbers as arguments (default: all);
// prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "hfl/image/augment.hpp"
#include "hfl/image/preprocess.hpp"
#include "hfl/learn/gradient_check.hpp"
#include "hfl/stats/descriptive.hpp"
#include "hfl/stats/ols.hpp"
#include "study_fixtures.hpp"

using namespace hfl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// 1. OLS against normal equations solved in long double plus textbook formulas.
Outcome ols_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(90210);
  double worst = 0.0;
  std::string worst_what;
  for (int d = 0; d < 200; ++d) {
    const int p = 1 + static_cast<int>(rng.below(5));
    const int n = p + 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(50 - p - 3 + 1)));
    stats::FeatureFrame f;
    f.values.resize(n, p);
    for (int j = 0; j < p; ++j) {
      f.names.push_back("x" + std::to_string(j));
      f.kinds.push_back(stats::ColumnKind::Continuous);
    }
    Eigen::VectorXd y(n);
    std::vector<double> beta(p);
    for (auto& b : beta) b = rng.normal();
    for (int i = 0; i < n; ++i) {
      double v = 1.5;
      for (int j = 0; j < p; ++j) {
        f.values(i, j) = rng.normal(0.0, 1.0 + j);
        v += beta[j] * f.values(i, j);
      }
      y(i) = v + rng.normal(0.0, 0.7);
    }
    const auto fit = stats::ols_fit(f, y);

    // Oracle: Gauss-Jordan on [X'X | I | X'y].
    const int q = p + 1;
    auto x = [&](int i, int j) -> long double { return j == 0 ? 1.0L : f.values(i, j - 1); };
    std::vector<std::vector<long double>> a(q, std::vector<long double>(2 * q + 1, 0.0L));
    for (int r = 0; r < q; ++r) {
      for (int c = 0; c < q; ++c)
        for (int i = 0; i < n; ++i) a[r][c] += x(i, r) * x(i, c);
      a[r][q + r] = 1.0L;
      for (int i = 0; i < n; ++i) a[r][2 * q] += x(i, r) * y(i);
    }
    for (int c = 0; c < q; ++c) {
      int piv = c;
      for (int r = c + 1; r < q; ++r)
        if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
      std::swap(a[c], a[piv]);
      const long double d0 = a[c][c];
      for (auto& v : a[c]) v /= d0;
      for (int r = 0; r < q; ++r) {
        if (r == c) continue;
        const long double m = a[r][c];
        for (int k = 0; k < 2 * q + 1; ++k) a[r][k] -= m * a[c][k];
      }
    }
    long double rss = 0.0L, ybar = 0.0L, tss = 0.0L;
    for (int i = 0; i < n; ++i) ybar += y(i);
    ybar /= n;
    for (int i = 0; i < n; ++i) {
      long double yhat = 0.0L;
      for (int j = 0; j < q; ++j) yhat += a[j][2 * q] * x(i, j);
      rss += (y(i) - yhat) * (y(i) - yhat);
      tss += (y(i) - ybar) * (y(i) - ybar);
    }
    const double df = n - p - 1;
    const long double sigma2 = rss / df;
    const double r2 = static_cast<double>(1.0L - rss / tss);
    const double aic = static_cast<double>(n * std::log(rss / n) + 2.0L * (p + 2));
    boost::math::students_t dist(df);

    auto track = [&](double got, double want, const std::string& what) {
      const double e = rel_err(got, want);
      if (e > worst) {
        worst = e;
        worst_what = what + " in design " + std::to_string(d);
      }
    };
    for (int j = 0; j < q; ++j) {
      const double est = static_cast<double>(a[j][2 * q]);
      const double se = static_cast<double>(std::sqrt(sigma2 * a[j][q + j]));
      const double t = est / se;
      const double pv = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      const auto& c = fit.coefficients[static_cast<std::size_t>(j)];
      track(c.estimate, est, "estimate");
      track(c.se, se, "se");
      track(c.t, t, "t");
      track(c.p, pv, "p");
    }
    track(fit.r2, r2, "r2");
    track(fit.adj_r2, 1.0 - (1.0 - r2) * (n - 1) / df, "adj_r2");
    track(fit.aic, aic, "aic");
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-8 && secs < 10.0,
          "200 designs, worst relative error " + fmt("%.2e", worst) + " (" + worst_what + "), " + fmt("%.2f", secs) + " s"};
}

// 2. Central differences on networks covering every layer type.
Outcome gradients() {
  using namespace hfl::learn;
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    std::string name;
    Shape input;
    std::vector<Layer> layers;
    int batch;
  };
  const std::vector<Case> cases = {
      {"conv-relu-gap-dense", {1, 6, 6}, {Conv2d{3, 3, 1, 1}, Relu{}, GlobalAvgPool{}, Dense{1, false}}, 3},
      {"strided conv stack",
       {2, 7, 7},
       {Conv2d{3, 3, 2, 1}, Relu{}, Conv2d{4, 3, 2, 1}, Relu{}, GlobalAvgPool{}, Dense{4, true}, Relu{}, Dense{1, false}},
       2},
      {"unpadded 5x5 conv", {1, 8, 8}, {Conv2d{2, 5, 1, 0}, Relu{}, GlobalAvgPool{}, Dense{1, false}}, 2},
      {"dense stack", {5, 1, 1}, {Dense{6, true}, Relu{}, Dense{3, true}, Relu{}, Dense{1, false}}, 4},
  };
  double worst = 0.0;
  std::string detail;
  Rng rng(4711);
  for (const auto& c : cases) {
    Network<double> net(c.input, c.layers);
    net.initialize(17);
    for (auto& v : net.params()) v += rng.normal(0.0, 0.1);
    Matrix<double> x(c.input.c, c.batch * c.input.h * c.input.w);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    std::vector<double> targets(static_cast<std::size_t>(c.batch));
    for (auto& t : targets) t = rng.normal();
    const auto r = gradient_check(net, x, c.batch, targets);
    worst = std::max(worst, r.max_relative_error);
    detail += c.name + " " + fmt("%.1e", r.max_relative_error) + "; ";
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-5 && secs < 60.0, detail + "max " + fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

pipeline::StudyConfig planted_study_config(std::uint64_t seed) {
  auto sc = cli::study_config(testing::recovery_config(), stats::TargetLabel::Rent, 1);
  sc.seed = seed;
  sc.benchmark.models = {pipeline::ModelKind::Ols};
  sc.subsets = false;
  sc.quadratic_terms = false;
  sc.exemplars = 0;
  return sc;
}

const pipeline::ModelBenchmark& ols_of(const std::vector<pipeline::ModelBenchmark>& b) {
  for (const auto& m : b)
    if (m.model == pipeline::ModelKind::Ols) return m;
  fail(ErrorKind::InvalidArgument, "no ols benchmark");
}

// 3. Recovery of the planted layout effect.
Outcome recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MarketConfig mc;
    mc.seed = seed;
    const auto s = testing::run_synthetic(mc, planted_study_config(seed));
    const auto& r = s.report;
    const auto& b1 = r.beta1();
    const auto& ols = ols_of(r.benchmark);
    const double corr = *r.sentiment_q_correlation;
    const bool a = corr >= 0.5, b = b1.estimate > 0.0 && b1.p < 1e-3, c = r.stage3.adj_r2 > r.stage1.adj_r2,
               d = r.aic_difference() > 10.0, e = ols.mse_reduction_pct > 0.0 && ols.t_sq.p < 0.05;
    const bool ok = a && b && c && d && e;
    passed += ok;
    std::printf("    seed %llu: corr(q) %.3f, beta1 %.4f p %.2e, adj_r2 %.4f -> %.4f, aic diff %.1f, ols mse reduction %.2f%% p %.2e  %s\n",
                static_cast<unsigned long long>(seed), corr, b1.estimate, b1.p, r.stage1.adj_r2, r.stage3.adj_r2,
                r.aic_difference(), ols.mse_reduction_pct, ols.t_sq.p, ok ? "ok" : "miss");
    std::fflush(stdout);
  }
  return {passed >= 4, std::to_string(passed) + "/5 seeds meet (a)-(e), " + fmt("%.0f", seconds_since(t0)) + " s"};
}

// 4. No layout effect: the sentiment should rarely look significant.
Outcome null_calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  int significant = 0;
  double abs_red = 0.0;
  for (std::uint64_t seed = 101; seed <= 120; ++seed) {
    MarketConfig mc;
    mc.seed = seed;
    mc.gamma_layout = 0.0;
    const auto s = testing::run_synthetic(mc, planted_study_config(seed));
    const auto& b1 = s.report.beta1();
    const double red = ols_of(s.report.benchmark).mse_reduction_pct;
    significant += b1.p < 0.01;
    abs_red += std::abs(red);
    std::printf("    seed %llu: beta1 %.4f p %.3f, ols mse reduction %.3f%%\n", static_cast<unsigned long long>(seed),
                b1.estimate, b1.p, red);
    std::fflush(stdout);
  }
  abs_red /= 20.0;
  return {significant <= 2 && abs_red < 2.0, std::to_string(significant) + "/20 significant at 1%, mean |reduction| " +
                                                  fmt("%.3f", abs_red) + "%, " + fmt("%.0f", seconds_since(t0)) + " s"};
}

// 5. Replays of published error and coefficient arithmetic.
Outcome printed_arithmetic() {
  struct Pair {
    double base, value, expected, tol;
  };
  const std::vector<Pair> pairs = {{0.00142, 0.00127, 10.56, 0.005}, {0.04984, 0.04400, 11.7, 0.05}, {0.1565, 0.1347, 13.93, 0.005}};
  bool ok = true;
  std::string detail;
  for (const auto& p : pairs) {
    const double got = stats::percent_reduction(p.base, p.value);
    ok = ok && std::abs(got - p.expected) <= p.tol;
    detail += fmt("%.4f", got) + " ";
  }
  for (auto [c, expected] : {std::pair{0.128, 13.65}, std::pair{-0.108, -10.23}}) {
    const double got = stats::effect_size_pct(c);
    ok = ok && std::abs(got - expected) <= 0.05;
    detail += fmt("%.4f", got) + " ";
  }
  return {ok, "reductions and effect sizes: " + detail};
}

// 6. Larger layout effect for small and old listings shows up in the subsets.
Outcome heterogeneity() {
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MarketConfig mc;
    mc.seed = seed;
    mc.gamma_small_boost = 1.0;
    mc.gamma_old_boost = 1.0;
    auto sc = planted_study_config(seed);
    sc.subsets = true;
    const auto s = testing::run_synthetic(mc, sc);
    auto red = [&](const std::string& name) {
      for (const auto& sub : s.report.subsets)
        if (sub.name == name) return ols_of(sub.benchmark).mse_reduction_pct;
      fail(ErrorKind::InvalidArgument, "missing subset " + name);
    };
    const double ab = red("area_below_median"), aa = red("area_above_median");
    const double yb = red("year_built_below_median"), ya = red("year_built_above_median");
    const bool ok = ab > aa && yb > ya;
    passed += ok;
    std::printf("    seed %llu: area below/above %.2f%% / %.2f%%, year_built below/above %.2f%% / %.2f%%  %s\n",
                static_cast<unsigned long long>(seed), ab, aa, yb, ya, ok ? "ok" : "miss");
    std::fflush(stdout);
  }
  return {passed >= 4, std::to_string(passed) + "/5 seeds order both splits correctly, " +
                           fmt("%.0f", seconds_since(t0)) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
  if (count_b != files.size()) {
    why = "file counts differ";
    return false;
  }
  for (const auto& f : files)
    if (slurp(a / f) != slurp(b / f)) {
      why = f.string() + " differs";
      return false;
    }
  return true;
}

// 7. Byte-identical outputs from repeated runs and across thread counts.
Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / ("hfl_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({"market": {"n_listings": 600}, "stage2": {"epochs": 8},
    "benchmark": {"gbt": {"trees": 50}, "mlp": {"epochs": 20}}})";

  std::ostringstream sink;
  auto gen = [&](const std::string& dir, int threads) {
    cli::Options o;
    o.config = cfg.string();
    o.out = (root / dir).string();
    o.seed = 11;
    o.threads = threads;
    o.emit_truth = true;
    return cli::cmd_generate(o, sink);
  };
  gen("data_1", 1);
  gen("data_4", 4);
  std::string why;
  const bool gen_same = same_tree(root / "data_1", root / "data_4", why);

  auto run = [&](const std::string& dir) {
    cli::Options o;
    o.config = cfg.string();
    o.data = (root / "data_1").string();
    o.out = (root / dir).string();
    o.seed = 11;
    o.deterministic = true;
    return cli::cmd_run(o, sink);
  };
  run("run_a");
  run("run_b");
  const bool report_same = slurp(root / "run_a" / "report.json") == slurp(root / "run_b" / "report.json") &&
                           !slurp(root / "run_a" / "report.json").empty();
  std::string why_run;
  const bool all_same = same_tree(root / "run_a", root / "run_b", why_run);
  fs::remove_all(root);
  return {gen_same && report_same && all_same,
          std::string("generation 1 vs 4 threads ") + (gen_same ? "identical" : "differs: " + why) +
              ", report.json " + (report_same ? "identical" : "differs") + ", run outputs " +
              (all_same ? "identical" : "differ: " + why_run) + ", " + fmt("%.0f", seconds_since(t0)) + " s"};
}

GrayImage random_image(Rng& rng, int w, int h, int lo, int hi) {
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
  return img;
}

// 8. Exact image-pipeline invariants over random inputs.
Outcome image_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(8);
  int failures = 0;
  std::string first;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && failures++ == 0) first = what;
  };
  for (int it = 0; it < 300; ++it) {
    const int w = 1 + static_cast<int>(rng.below(60)), h = 1 + static_cast<int>(rng.below(60));

    // Sparse dark content on a white page.
    GrayImage page(w, h, 255);
    const int marks = 1 + static_cast<int>(rng.below(8));
    for (int m = 0; m < marks; ++m)
      page.at(static_cast<int>(rng.below(static_cast<std::uint64_t>(w))), static_cast<int>(rng.below(static_cast<std::uint64_t>(h)))) =
          static_cast<std::uint8_t>(rng.below(250));
    const GrayImage once = crop_to_content(page);
    check(crop_to_content(once) == once, "crop idempotence");

    const GrayImage any = random_image(rng, w, h, 1, 255);
    const int side = 8 + static_cast<int>(rng.below(57));
    const GrayImage boxed = letterbox_resize(any, side);
    const auto pl = letterbox_placement(w, h, side);
    bool fill_ok = boxed.width == side && boxed.height == side;
    for (int y = 0; y < side && fill_ok; ++y)
      for (int x = 0; x < side; ++x) {
        const bool inside = x >= pl.offset_x && x < pl.offset_x + pl.content_width && y >= pl.offset_y &&
                            y < pl.offset_y + pl.content_height;
        if (inside == (boxed.at(x, y) == 0)) fill_ok = false;
      }
    check(fill_ok, "letterbox fill");
    const double scale = static_cast<double>(side) / std::max(w, h);
    check(std::abs(pl.content_width - w * scale) <= 1.0 && std::abs(pl.content_height - h * scale) <= 1.0,
          "letterbox aspect");

    const int s = 2 + static_cast<int>(rng.below(40));
    GrayImage sq = random_image(rng, s, s, 0, 255);
    sq.pixels[0] = 3;
    sq.pixels[1] = 200;
    const auto t = minmax_normalize(sq);
    const auto [mn, mx] = std::minmax_element(t.values.begin(), t.values.end());
    check(*mn == 0.0f && *mx == 1.0f, "minmax bounds");
    const auto flat = minmax_normalize(GrayImage(s, s, static_cast<std::uint8_t>(rng.below(256))));
    check(std::all_of(flat.values.begin(), flat.values.end(), [](float v) { return v == 0.0f; }), "constant image");

    check(mirror_horizontal(mirror_horizontal(any)) == any, "mirror involution");
    check(rotate(any, 0.0) == any, "zero rotation");
    check(rotate_quarter_turns(rotate_quarter_turns(any, 1), 3) == any, "quarter turns compose");
    for (int k = -4; k <= 4; ++k) {
      const GrayImage r = rotate(sq, k * std::numbers::pi / 2.0);
      check(r == rotate_quarter_turns(sq, k), "rotation by k*pi/2");
      auto a = r.pixels, b = sq.pixels;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      check(a == b, "rotation is a permutation");
    }
    check(rotate(rotate(sq, std::numbers::pi / 2.0), -std::numbers::pi / 2.0) == sq, "rotation inverse");
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 10.0,
          std::to_string(failures) + " violations" + (first.empty() ? "" : " (first: " + first + ")") + " in 300 rounds, " +
              fmt("%.2f", secs) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "ols oracle equivalence", ols_oracle},
      {2, "gradient correctness", gradients},
      {3, "planted-signal recovery", recovery},
      {4, "null calibration", null_calibration},
      {5, "printed-arithmetic replay", printed_arithmetic},
      {6, "heterogeneity direction", heterogeneity},
      {7, "determinism", determinism},
      {8, "image pipeline invariants", image_invariants},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
