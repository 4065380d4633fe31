#include <CLI11.hpp>
#include <iostream>

#include "hfl/cli/commands.hpp"

namespace {

void add_common(CLI::App* cmd, hfl::cli::Options& o) {
  cmd->add_option("--config", o.config, "RunConfig JSON file");
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_flag("--force", o.force, "overwrite a non-empty output directory");
  cmd->add_option("--threads", o.threads, "worker threads (default HFL_THREADS or core count)");
  cmd->add_flag("--deterministic", o.deterministic, "single-threaded, bit-exact execution");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hfl::cli;
  CLI::App app{"Hedonic rent study with floor plan sentiment"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "write a synthetic market dataset");
  add_common(gen, o);
  gen->add_option("--out", o.out, "dataset directory");
  gen->add_option("--size", o.size, "plan raster size in pixels");
  gen->add_flag("--emit-truth", o.emit_truth, "also write truth.csv with the planted layout quality");

  auto* pre = app.add_subcommand("preprocess", "crop and letterbox plans into a sized cache");
  add_common(pre, o);
  pre->add_option("--data", o.data, "dataset directory")->required();
  pre->add_option("--out", o.out, "output dataset directory");
  pre->add_option("--size", o.size, "output side in pixels");

  auto* run = app.add_subcommand("run", "run the full study on a dataset");
  add_common(run, o);
  run->add_option("--data", o.data, "dataset directory")->required();
  run->add_option("--out", o.out, "output directory");
  run->add_option("--target", o.target, "rent or rpms")->check(CLI::IsMember({"rent", "rpms"}));
  run->add_option("--size", o.size, "cnn input side in pixels");
  run->add_option("--folds", o.folds, "cross-validation folds");
  run->add_option("--models", o.models, "benchmark models, e.g. ols,gbt,mlp");

  auto* rep = app.add_subcommand("report", "plots and tables from report.json");
  rep->add_option("report", o.report, "report.json")->required();
  rep->add_option("--out", o.out, "output directory")->required();
  rep->add_flag("--force", o.force, "overwrite a non-empty output directory");

  auto* ex = app.add_subcommand("exemplars", "collect the plans with the largest sentiment adjustments");
  ex->add_option("report", o.report, "report.json")->required();
  ex->add_option("--data", o.data, "dataset directory")->required();
  ex->add_option("--out", o.out, "output directory")->required();
  ex->add_flag("--force", o.force, "overwrite a non-empty output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*pre) return cmd_preprocess(o);
    if (*run) return cmd_run(o);
    if (*rep) return cmd_report(o);
    if (*ex) return cmd_exemplars(o);
  } catch (const hfl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitConfig;
}
