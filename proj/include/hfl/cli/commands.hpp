#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hfl/cli/config.hpp"
#include "hfl/cli/svg.hpp"
#include "hfl/core/error.hpp"
#include "hfl/core/format.hpp"
#include "hfl/learn/checkpoint.hpp"
#include "hfl/market/dataset_io.hpp"
#include "hfl/market/rasterize.hpp"
#include "hfl/pipeline/report.hpp"

namespace hfl::cli {

namespace fs = std::filesystem;

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
    case ErrorKind::PgmFormatError: return kExitIo;
    case ErrorKind::DivergenceDetected:
    case ErrorKind::SingularDesign:
    case ErrorKind::CollinearSentiment:
    case ErrorKind::ConstantColumn:
    case ErrorKind::NonPositiveBase: return kExitNumeric;
    default: return kExitConfig;
  }
}

// Command-line values; unset ones fall back to the config file, then defaults.
struct Options {
  std::optional<std::string> config, data, out, report;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> target, models;
  std::optional<int> size, folds, threads;
  bool deterministic = false;
  bool emit_truth = false;
  bool force = false;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline RunConfig resolve_config(const Options& o) {
  RunConfig c = o.config ? load_config(*o.config) : RunConfig{};
  if (o.seed) c.seed = *o.seed;
  if (o.target) c.targets = {stats::parse_target(*o.target)};
  if (o.size) {
    c.image.side = *o.size;
    c.market.raster_size = *o.size;
  }
  if (o.folds) c.folds = *o.folds;
  if (o.models) c.benchmark.models = detail::parse_models(split_list(*o.models));
  if (o.out) c.out = *o.out;
  validate(c);
  return c;
}

// --deterministic wins, then --threads, then HFL_THREADS, then the core count.
inline int resolve_threads(const Options& o) {
  if (o.deterministic) return 1;
  if (o.threads) {
    require(*o.threads >= 1, ErrorKind::ConfigError, "--threads must be >= 1");
    return *o.threads;
  }
  if (const char* env = std::getenv("HFL_THREADS")) {
    const long long v = parse_int(env, "HFL_THREADS");
    require(v >= 1, ErrorKind::ConfigError, "HFL_THREADS must be >= 1");
    return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

inline fs::path output_dir(const RunConfig& c) {
  require(!c.out.empty(), ErrorKind::ConfigError, "no output directory (use --out)");
  return c.out;
}

// Refuses a non-empty existing directory unless forced.
inline void prepare_out_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir)) fail(ErrorKind::IoError, dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !force)
      fail(ErrorKind::IoError, dir.string() + " is not empty; pass --force to overwrite");
  }
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::IoError, "short write to " + path.string());
}

inline std::vector<GrayImage> render_plans(const Market& m, int size) {
  std::vector<GrayImage> out;
  out.reserve(m.geometries.size());
  for (const auto& g : m.geometries) out.push_back(rasterize(g, size));
  return out;
}

inline int cmd_generate(const Options& o, std::ostream& log = std::cout) {
  const RunConfig c = resolve_config(o);
  const fs::path dir = output_dir(c);
  prepare_out_dir(dir, o.force);
  MarketConfig mc = c.market;
  mc.seed = c.seed;
  const Market m = generate_market(mc, static_cast<unsigned>(resolve_threads(o)));
  write_dataset(dir, m.listings, render_plans(m, mc.raster_size), o.emit_truth ? &m.truth : nullptr);
  log << "generated n=" << m.listings.size() << " seed=" << mc.seed << " truth=" << (o.emit_truth ? "yes" : "no")
      << " -> " << dir.string() << '\n';
  return kExitOk;
}

inline Dataset load_dataset(const Options& o) {
  require(o.data.has_value(), ErrorKind::ConfigError, "no dataset directory (use --data)");
  return read_dataset(*o.data);
}

// Crops and letterboxes every plan to the configured side.
inline int cmd_preprocess(const Options& o, std::ostream& log = std::cout) {
  const RunConfig c = resolve_config(o);
  const Dataset ds = load_dataset(o);
  const fs::path dir = output_dir(c);
  prepare_out_dir(dir, o.force);
  const auto prepared =
      pipeline::prepare_images(ds.images, c.image.side, static_cast<std::uint8_t>(c.image.background_threshold));
  write_dataset(dir, ds.listings, prepared, ds.truth ? &*ds.truth : nullptr);
  log << "preprocessed " << prepared.size() << " plans to " << c.image.side << "x" << c.image.side << " -> "
      << dir.string() << '\n';
  return kExitOk;
}

inline void write_error_csvs(const fs::path& dir, const pipeline::StudyReport& r) {
  for (const auto& b : r.benchmark) {
    for (bool with : {false, true}) {
      std::string text = "id,fold,sq_err,abs_err\n";
      const auto& sq = with ? b.obs.sq_with : b.obs.sq_without;
      const auto& ab = with ? b.obs.abs_with : b.obs.abs_without;
      for (std::size_t i = 0; i < b.obs.ids.size(); ++i)
        text += std::to_string(b.obs.ids[i]) + "," + std::to_string(b.obs.fold[i]) + "," + format_g9(sq[i]) + "," +
                format_g9(ab[i]) + "\n";
      write_text(dir / ("errors_" + std::string(pipeline::to_string(b.model)) + (with ? "_with" : "_without") + ".csv"),
                 text);
    }
  }
}

inline void write_sentiment_csv(const fs::path& dir, const pipeline::SentimentScores& s) {
  std::string text = "id,score,fold\n";
  for (std::size_t i = 0; i < s.ids.size(); ++i)
    text += std::to_string(s.ids[i]) + "," + format_g9(s.scores[i]) + "," + std::to_string(s.fold[i]) + "\n";
  write_text(dir / "sentiment.csv", text);
}

inline Json report_document(const RunConfig& c, const std::vector<pipeline::StudyReport>& studies) {
  Json arr = Json::array();
  for (const auto& s : studies) arr.push_back(pipeline::to_json(s));
  return Json{{"schema_version", pipeline::kReportSchemaVersion}, {"config", to_json(c)}, {"studies", arr}};
}

// Full study per configured target. With several targets each gets its own
// subdirectory for the per-observation files.
inline int cmd_run(const Options& o, std::ostream& log = std::cerr) {
  const RunConfig c = resolve_config(o);
  const int threads = resolve_threads(o);
  const Dataset ds = load_dataset(o);
  require(!ds.listings.empty(), ErrorKind::EmptyInput, "dataset has no listings");
  const fs::path dir = output_dir(c);
  prepare_out_dir(dir, o.force);

  int max_district = 0;
  for (const auto& l : ds.listings) max_district = std::max(max_district, l.district);

  std::vector<pipeline::StudyReport> studies;
  for (auto target : c.targets) {
    pipeline::StudyConfig sc = study_config(c, target, threads);
    sc.variables.n_districts = max_district + 1;
    const std::string tag = stats::to_string(target);
    auto r = pipeline::run_study(ds.listings, ds.images, ds.truth, sc,
                                 [&](const std::string& msg) { log << "[" << tag << "] " << msg << '\n'; });
    const fs::path sub = c.targets.size() > 1 ? dir / tag : dir;
    fs::create_directories(sub / "models");
    write_error_csvs(sub, r);
    write_sentiment_csv(sub, r.sentiment);
    for (const auto& m : r.sentiment.models)
      learn::save_checkpoint((sub / "models" / ("fold_" + std::to_string(m.fold) + ".json")).string(), m.model, m.train);
    studies.push_back(std::move(r));
  }
  write_text(dir / "report.json", report_document(c, studies).dump(2) + "\n");
  for (const auto& s : studies) {
    const auto& b1 = s.beta1();
    log << "[" << stats::to_string(s.target) << "] sentiment coefficient " << format_g9(b1.estimate) << " (p "
        << format_g9(b1.p) << "), aic difference " << format_g9(s.aic_difference()) << '\n';
  }
  log << "wrote " << (dir / "report.json").string() << '\n';
  return kExitOk;
}

inline nlohmann::json read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot read report " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::SchemaMismatch, path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || j["schema_version"] != pipeline::kReportSchemaVersion ||
      !j.contains("studies") || !j["studies"].is_array() || j["studies"].empty())
    fail(ErrorKind::SchemaMismatch, path + " is not a version " + std::to_string(pipeline::kReportSchemaVersion) +
                                        " report");
  return j;
}

inline double number_or_nan(const nlohmann::json& v) {
  return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

inline std::string exemplar_text(const nlohmann::json& report) {
  std::string text;
  for (const auto& s : report.at("studies")) {
    text += "target " + s.at("target").get<std::string>() + "\n";
    if (!s.contains("exemplars")) {
      text += "  no exemplars\n";
      continue;
    }
    const auto& e = s.at("exemplars");
    text += "model " + e.at("model").get<std::string>() + "\n";
    for (const char* side : {"positive", "negative"}) {
      text += std::string(side) + "\n";
      int rank = 1;
      for (const auto& a : e.at(side))
        text += "  " + std::to_string(rank++) + "  id " + std::to_string(a.at("id").get<std::int64_t>()) +
                "  adjustment " + format_g9(a.at("adjustment").get<double>()) + "\n";
    }
  }
  return text;
}

// Plots and tables from a stored report.
inline int cmd_report(const Options& o, std::ostream& log = std::cout) {
  require(o.report.has_value(), ErrorKind::ConfigError, "no report.json given");
  require(o.out.has_value(), ErrorKind::ConfigError, "no output directory (use --out)");
  const nlohmann::json report = read_report(*o.report);
  const fs::path dir = *o.out;
  try {
    prepare_out_dir(dir, o.force);
    const auto& studies = report.at("studies");
    std::string csv = "target,model,floor_plans,mse,mae\n";
    for (std::size_t i = 0; i < studies.size(); ++i) {
      const auto& s = studies[i];
      const std::string target = s.at("target").get<std::string>();
      std::vector<CoefficientRow> rows;
      for (const auto& c : s.at("stage3").at("coefficients"))
        rows.push_back({c.at("name").get<std::string>(), number_or_nan(c.at("estimate")), number_or_nan(c.at("se"))});
      write_text(dir / (i == 0 ? "coefficients.svg" : "coefficients_" + target + ".svg"),
                 coefficient_plot(rows, "Standardized estimates, log " + target));
      for (const auto& b : s.at("benchmark")) {
        const std::string model = b.at("model").get<std::string>();
        csv += target + "," + model + ",without," + format_g9(b.at("mse_without").get<double>()) + "," +
               format_g9(b.at("mae_without").get<double>()) + "\n";
        csv += target + "," + model + ",with," + format_g9(b.at("mse_with").get<double>()) + "," +
               format_g9(b.at("mae_with").get<double>()) + "\n";
      }
    }
    write_text(dir / "results.csv", csv);
    const auto& ccdf = studies[0].at("ccdf");
    for (const char* var : {"rent", "rpms"})
      write_text(dir / ("ccdf_" + std::string(var) + ".svg"),
                 ccdf_plot(ccdf.at(var).at("x").get<std::vector<double>>(), ccdf.at(var).at("p").get<std::vector<double>>(),
                           std::string("P(") + var + " > x)", var));
    write_text(dir / "exemplars.txt", exemplar_text(report));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaMismatch, std::string("report is missing fields: ") + e.what());
  }
  log << "wrote report artifacts to " << dir.string() << '\n';
  return kExitOk;
}

// Copies the plans of the exemplar listings next to a ranked listing.
inline int cmd_exemplars(const Options& o, std::ostream& log = std::cout) {
  require(o.report.has_value(), ErrorKind::ConfigError, "no report.json given");
  require(o.data.has_value(), ErrorKind::ConfigError, "no dataset directory (use --data)");
  require(o.out.has_value(), ErrorKind::ConfigError, "no output directory (use --out)");
  const nlohmann::json report = read_report(*o.report);
  const fs::path dir = *o.out;
  prepare_out_dir(dir, o.force);
  std::size_t copied = 0;
  try {
    for (const auto& s : report.at("studies")) {
      if (!s.contains("exemplars")) continue;
      const std::string target = s.at("target").get<std::string>();
      for (const char* side : {"positive", "negative"}) {
        int rank = 1;
        for (const auto& a : s.at("exemplars").at(side)) {
          const auto id = a.at("id").get<std::int64_t>();
          const GrayImage img = read_pgm(plan_path(*o.data, id));
          write_pgm((dir / (target + "_" + side + "_" + std::to_string(rank++) + "_" + std::to_string(id) + ".pgm")).string(),
                    img);
          ++copied;
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaMismatch, std::string("report is missing fields: ") + e.what());
  }
  write_text(dir / "exemplars.txt", exemplar_text(report));
  log << "copied " << copied << " exemplar plans to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace hfl::cli
