#pragma once

#include <string>

#include "tripurpose/config.hpp"

namespace tripurpose {

// Library entry points behind the CLI subcommands. Each one loads its inputs,
// writes its artifacts under out_dir, records the config hash in
// run_manifest.json, and logs one throughput line per stage to stderr. A
// missing input raises StageDependency naming the file and the stage that
// produces it.
void cmd_synth(const RunConfig& config);
void cmd_extract(const RunConfig& config);
void cmd_zones(const RunConfig& config);
void cmd_infer(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_calibrate(const RunConfig& config);
void cmd_robustness(const RunConfig& config);
void cmd_plot_data(const RunConfig& config);

// A path entry resolved against out_dir (absolute entries pass through).
std::string resolve_path(const RunConfig& config, const std::string& path);

// config.workers, with 0 resolved to the hardware thread count.
unsigned resolve_workers(const RunConfig& config);

}  // namespace tripurpose
