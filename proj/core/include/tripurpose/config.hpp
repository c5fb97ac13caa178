#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tripurpose/calibration.hpp"
#include "tripurpose/params.hpp"
#include "tripurpose/synthetic.hpp"

namespace tripurpose {

// Everything a run needs, resolvable from an INI-style config file plus
// command-line overrides. Every field has a working default, so an empty (or
// absent) file is a valid configuration; unknown keys are rejected rather
// than ignored so a typo cannot silently fall back to a default.
struct RunConfig {
  // [paths] — relative entries are resolved against out_dir.
  std::string out_dir = ".";
  std::string pings = "pings.csv";
  std::string pois = "pois.csv";
  std::string reference = "reference.stats";
  std::string staypoints = "staypoints.csv";
  std::string labeled = "labeled_staypoints.csv";
  // Optional parameter INI (e.g. a calibration's params_final.ini) applied on
  // top of the main file and overrides.
  std::string params_in;

  // [run]
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 = one per hardware thread

  // [extraction] [clustering] [zones] [bidding] [scoring] [confidence]
  PipelineParams params;

  // [calibration]
  CalibrationSettings calibration;

  // [robustness]
  std::vector<double> noise_sigmas{5.0, 10.0, 20.0};
  std::vector<double> poi_delete_rates{0.05, 0.10};
  std::int64_t match_tolerance_s = 0;

  // [synth]
  SynthConfig synth;

  // FNV-1a over the canonical serialization of every key, filled by
  // load_run_config; identical effective settings hash identically no matter
  // how they were supplied.
  std::uint64_t config_hash = 0;
};

// Parses `path` (empty = defaults only), applies "section.key=value"
// overrides in order, overlays params_in when set, and computes config_hash.
// Unknown keys, malformed values, and out-of-domain values raise Config.
RunConfig load_run_config(const std::string& path, std::span<const std::string> overrides = {});

// One "section.key = value" line per key, in table order: the canonical form
// config_hash is computed over.
std::string serialize_config(const RunConfig& config);

std::uint64_t hash_config(const RunConfig& config);

// The pipeline-parameter subset as an INI file (sections extraction through
// confidence). Written by calibrate as params_final.ini; loadable back via
// RunConfig::params_in.
void write_params_ini(const std::string& path, const PipelineParams& params);

// Applies an INI holding pipeline-parameter keys onto `config`. Non-pipeline
// keys in the file are rejected.
void apply_params_ini(RunConfig& config, const std::string& path);

}  // namespace tripurpose
