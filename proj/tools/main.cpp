#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tripurpose/commands.hpp"
#include "tripurpose/config.hpp"
#include "tripurpose/error.hpp"

namespace {

// Config and Schema problems are usage errors (1); broken data is 2; a
// missing upstream artifact is 3 so pipelines can tell "run the previous
// stage" apart from "your data is bad".
int exit_code_for(tripurpose::ErrorKind kind) {
  switch (kind) {
    case tripurpose::ErrorKind::Config:
      return 1;
    case tripurpose::ErrorKind::StageDependency:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trip-purpose inference over GPS staypoints"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may appear after the subcommand

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string params_in;
  std::string seed;
  std::string workers;
  app.add_option("-c,--config", config_path, "INI configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", sets, "Override one key, as section.key=value (repeatable)");
  app.add_option("-o,--out", out_dir, "Output directory (paths.out_dir)");
  app.add_option("--params", params_in, "Pipeline-parameter INI to apply (paths.params_in)");
  app.add_option("--seed", seed, "Master random seed (run.seed)");
  app.add_option("--workers", workers, "Worker threads, 0 = hardware (run.workers)");

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  CLI::App* extract = app.add_subcommand("extract", "Extract staypoints from raw pings");
  CLI::App* zones = app.add_subcommand("zones", "Cluster POIs into semantic zones");
  CLI::App* infer = app.add_subcommand("infer", "Label staypoints with activities");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score labeled staypoints against the reference");
  CLI::App* calibrate = app.add_subcommand("calibrate", "Calibrate parameters in three phases");
  CLI::App* robustness =
      app.add_subcommand("robustness", "Measure label stability under noise and POI deletion");
  CLI::App* plot_data = app.add_subcommand("plot-data", "Export plot-ready CSV series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  // Named flags are sugar for --set entries and win over earlier ones.
  if (!out_dir.empty()) sets.push_back("paths.out_dir=" + out_dir);
  if (!params_in.empty()) sets.push_back("paths.params_in=" + params_in);
  if (!seed.empty()) sets.push_back("run.seed=" + seed);
  if (!workers.empty()) sets.push_back("run.workers=" + workers);

  try {
    tripurpose::RunConfig config = tripurpose::load_run_config(config_path, sets);
    if (synth->parsed()) tripurpose::cmd_synth(config);
    if (extract->parsed()) tripurpose::cmd_extract(config);
    if (zones->parsed()) tripurpose::cmd_zones(config);
    if (infer->parsed()) tripurpose::cmd_infer(config);
    if (evaluate->parsed()) tripurpose::cmd_evaluate(config);
    if (calibrate->parsed()) tripurpose::cmd_calibrate(config);
    if (robustness->parsed()) tripurpose::cmd_robustness(config);
    if (plot_data->parsed()) tripurpose::cmd_plot_data(config);
    return 0;
  } catch (const tripurpose::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
