#include "tripurpose/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tripurpose/calibration.hpp"
#include "tripurpose/csv.hpp"
#include "tripurpose/error.hpp"
#include "tripurpose/extraction.hpp"
#include "tripurpose/ingest.hpp"
#include "tripurpose/metrics.hpp"
#include "tripurpose/pipeline.hpp"
#include "tripurpose/robustness.hpp"
#include "tripurpose/synthetic.hpp"
#include "tripurpose/zones.hpp"

namespace tripurpose {
namespace {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Wall-clock throughput logging; goes to stderr so artifacts stay clean.
class StageTimer {
 public:
  explicit StageTimer(const char* stage) : stage_(stage), start_(Clock::now()) {}

  void finish(std::size_t count, const char* unit) const {
    double seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    double rate = static_cast<double>(count) / std::max(seconds, 1e-9);
    std::fprintf(stderr, "[%s] %zu %s in %.2f s (%.0f %s/s)\n", stage_, count, unit, seconds, rate,
                 unit);
  }

 private:
  using Clock = std::chrono::steady_clock;
  const char* stage_;
  Clock::time_point start_;
};

void require_input(const std::string& path, const char* producer) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::StageDependency,
         "missing input " + path + "; produce it with `tripurpose " + producer + "`");
  }
}

void ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + config.out_dir + ": " + ec.message());
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::CorruptInput, path + ": not valid JSON");
  return j;
}

// Appends/overwrites this command's entry in run_manifest.json, recording the
// config hash every artifact was produced under.
void update_manifest(const RunConfig& config, const std::string& command,
                     std::vector<std::string> artifacts) {
  std::string path = resolve_path(config, "run_manifest.json");
  json manifest = json::object();
  if (std::filesystem::exists(path)) manifest = load_json_file(path);
  if (!manifest.is_object()) fail(ErrorKind::CorruptInput, path + ": expected a JSON object");
  manifest[command] = {{"config_hash", hash_hex(config.config_hash)}, {"artifacts", artifacts}};
  write_json_file(path, manifest);
}

json report_json(const EvalReport& r) {
  return {{"jsd_freq", r.jsd_freq},
          {"jsd_start", r.jsd_start},
          {"jsd_dur", r.jsd_dur},
          {"hcr_mandatory", r.hcr_mandatory},
          {"hcr_nonmandatory", r.hcr_nonmandatory},
          {"hcr_mandatory_empty", r.hcr_mandatory_empty},
          {"hcr_nonmandatory_empty", r.hcr_nonmandatory_empty},
          {"staypoint_count", r.staypoint_count},
          {"flagged_query_fraction", r.flagged_query_fraction}};
}

json cell_json(const StabilityCell& c) {
  return {{"matched", c.matched}, {"stable", c.stable}, {"rate", c.rate()}};
}

json stability_json(const RunConfig& config, const StabilityReport& r, const char* kind,
                    double level) {
  json by_activity = json::object();
  for (Activity a : all_activities()) {
    by_activity[std::string(activity_name(a))] = cell_json(r.by_activity[index_of(a)]);
  }
  return {{"config_hash", hash_hex(config.config_hash)},
          {"kind", kind},
          {"level", level},
          {"original_count", r.original_count},
          {"perturbed_count", r.perturbed_count},
          {"matched", r.matched},
          {"match_rate", r.match_rate},
          {"all", cell_json(r.all)},
          {"high_confidence", cell_json(r.high_confidence)},
          {"low_confidence", cell_json(r.low_confidence)},
          {"weighted_avg", r.weighted_avg},
          {"by_activity", by_activity}};
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  return out;
}

std::size_t count_points(const StaypointCorpus& corpus) {
  std::size_t n = 0;
  for (const auto& agent : corpus) n += agent.points.size();
  return n;
}

std::size_t count_pings(const PingCorpus& corpus) {
  std::size_t n = 0;
  for (const auto& agent : corpus) n += agent.pings.size();
  return n;
}

}  // namespace

std::string resolve_path(const RunConfig& config, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || config.out_dir.empty()) return path;
  return (std::filesystem::path(config.out_dir) / p).string();
}

unsigned resolve_workers(const RunConfig& config) {
  if (config.workers > 0) return config.workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void cmd_synth(const RunConfig& config) {
  config.synth.validate();
  ensure_out_dir(config);
  StageTimer timer("synth");
  SyntheticCorpus corpus = generate_synthetic(config.synth, config.seed, resolve_workers(config));
  write_pings(resolve_path(config, config.pings), corpus.pings);
  write_pois(resolve_path(config, config.pois), corpus.pois);
  write_reference(resolve_path(config, config.reference), config.synth.ref);
  write_truth(resolve_path(config, "truth.csv"), corpus.truth);
  write_anchors(resolve_path(config, "anchors.csv"), corpus.truth);
  timer.finish(count_pings(corpus.pings), "pings");
  update_manifest(config, "synth",
                  {config.pings, config.pois, config.reference, "truth.csv", "anchors.csv"});
}

void cmd_extract(const RunConfig& config) {
  config.params.validate();
  ensure_out_dir(config);
  std::string in_path = resolve_path(config, config.pings);
  require_input(in_path, "synth");
  StageTimer timer("extract");

  // One agent in memory at a time; the output corpus holds staypoints only,
  // which are orders of magnitude smaller than the ping stream.
  PingStreamReader reader(in_path);
  StaypointCorpus corpus;
  AgentPings agent;
  while (reader.next_agent(agent)) {
    std::vector<Staypoint> points = extract_staypoints(agent.pings, config.params.extraction);
    if (!points.empty()) corpus.push_back({agent.agent_id, std::move(points)});
  }
  write_staypoints(resolve_path(config, config.staypoints), corpus);
  std::size_t total = count_points(corpus);
  timer.finish(total, "staypoints");
  if (reader.stats().skipped > 0) {
    std::fprintf(stderr, "[extract] skipped %zu malformed ping rows\n", reader.stats().skipped);
  }
  update_manifest(config, "extract", {config.staypoints});
}

void cmd_zones(const RunConfig& config) {
  config.params.validate();
  ensure_out_dir(config);
  std::string poi_path = resolve_path(config, config.pois);
  require_input(poi_path, "synth");
  StageTimer timer("zones");
  std::vector<Poi> pois = load_pois(poi_path);
  std::vector<SemanticZone> zones =
      build_zones(pois, config.params.eps_poi_m, config.params.min_pts_poi);
  write_zones(resolve_path(config, "zones.csv"), zones);
  timer.finish(zones.size(), "zones");
  update_manifest(config, "zones", {"zones.csv"});
}

void cmd_infer(const RunConfig& config) {
  config.params.validate();
  ensure_out_dir(config);
  std::string stay_path = resolve_path(config, config.staypoints);
  std::string poi_path = resolve_path(config, config.pois);
  std::string ref_path = resolve_path(config, config.reference);
  require_input(stay_path, "extract");
  require_input(poi_path, "synth");
  require_input(ref_path, "synth");

  StageTimer timer("infer");
  StaypointCorpus staypoints = load_staypoints(stay_path);
  std::vector<Poi> pois = load_pois(poi_path);
  ReferenceStats ref = load_reference(ref_path);
  LabelingResult result =
      label_corpus(staypoints, pois, ref, config.params, resolve_workers(config), false);
  write_staypoints(resolve_path(config, config.labeled), result.labeled);

  json stats = {{"config_hash", hash_hex(config.config_hash)},
                {"staypoint_count", result.report.staypoint_count},
                {"theta_exist", result.theta_exist},
                {"spatial_queries", result.spatial_queries},
                {"flagged_queries", result.flagged_queries},
                {"flagged_query_fraction", result.report.flagged_query_fraction}};
  write_json_file(resolve_path(config, "infer_stats.json"), stats);
  timer.finish(result.report.staypoint_count, "staypoints");
  update_manifest(config, "infer", {config.labeled, "infer_stats.json"});
}

void cmd_evaluate(const RunConfig& config) {
  ensure_out_dir(config);
  std::string labeled_path = resolve_path(config, config.labeled);
  std::string ref_path = resolve_path(config, config.reference);
  require_input(labeled_path, "infer");
  require_input(ref_path, "synth");

  StageTimer timer("evaluate");
  StaypointCorpus corpus = load_staypoints(labeled_path);
  ReferenceStats ref = load_reference(ref_path);
  EvalReport report = build_report(corpus, ref, config.params.hcr_threshold);

  // The flagged-query fraction is a property of the inference run, not of the
  // labeled file; pick it up from infer's sidecar when it is present.
  std::string stats_path = resolve_path(config, "infer_stats.json");
  if (std::filesystem::exists(stats_path)) {
    json stats = load_json_file(stats_path);
    if (stats.contains("flagged_query_fraction")) {
      report.flagged_query_fraction = stats["flagged_query_fraction"].get<double>();
    }
  }

  json j = report_json(report);
  j["config_hash"] = hash_hex(config.config_hash);
  write_json_file(resolve_path(config, "report.json"), j);
  timer.finish(report.staypoint_count, "staypoints");
  update_manifest(config, "evaluate", {"report.json"});
}

void cmd_calibrate(const RunConfig& config) {
  config.params.validate();
  ensure_out_dir(config);
  std::string stay_path = resolve_path(config, config.staypoints);
  std::string poi_path = resolve_path(config, config.pois);
  std::string ref_path = resolve_path(config, config.reference);
  require_input(stay_path, "extract");
  require_input(poi_path, "synth");
  require_input(ref_path, "synth");

  StageTimer timer("calibrate");
  StaypointCorpus staypoints = load_staypoints(stay_path);
  std::vector<Poi> pois = load_pois(poi_path);
  ReferenceStats ref = load_reference(ref_path);

  CalibrationSettings settings = config.calibration;
  settings.nsga.seed = config.seed;
  CalibrationResult result =
      run_phases(staypoints, pois, ref, config.params, settings, resolve_workers(config));

  json phases = json::array();
  std::size_t evaluations = 0;
  for (const PhaseTrace& trace : result.phases) {
    evaluations += trace.evaluations;
    json knee_genes = json::object();
    std::vector<std::size_t> indices = genes_for_phase(trace.phase);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      knee_genes[std::string(gene_table()[indices[i]].name)] = trace.knee_genes[i];
    }
    json front = json::array();
    for (const Individual& ind : trace.front) {
      front.push_back({{"genes", ind.genes}, {"objectives", ind.objectives}});
    }
    phases.push_back({{"phase", trace.phase},
                      {"evaluations", trace.evaluations},
                      {"warnings", trace.warnings},
                      {"knee_genes", knee_genes},
                      {"knee_objectives", trace.knee_objectives},
                      {"front", front},
                      {"report", report_json(trace.report)}});
  }
  json trace = {{"config_hash", hash_hex(config.config_hash)},
                {"baseline", report_json(result.baseline_report)},
                {"phases", phases},
                {"final", report_json(result.final_report)}};
  write_json_file(resolve_path(config, "calibration_trace.json"), trace);
  write_params_ini(resolve_path(config, "params_final.ini"), result.params);

  // Each objective evaluation touches every subsampled staypoint.
  timer.finish(evaluations * result.baseline_report.staypoint_count, "staypoints");
  update_manifest(config, "calibrate", {"calibration_trace.json", "params_final.ini"});
}

void cmd_robustness(const RunConfig& config) {
  config.params.validate();
  ensure_out_dir(config);
  std::string labeled_path = resolve_path(config, config.labeled);
  std::string ping_path = resolve_path(config, config.pings);
  std::string poi_path = resolve_path(config, config.pois);
  std::string ref_path = resolve_path(config, config.reference);
  require_input(labeled_path, "infer");
  require_input(ping_path, "synth");
  require_input(poi_path, "synth");
  require_input(ref_path, "synth");

  StageTimer timer("robustness");
  StaypointCorpus labeled = load_staypoints(labeled_path);
  PingCorpus pings = load_pings(ping_path);
  std::vector<Poi> pois = load_pois(poi_path);
  ReferenceStats ref = load_reference(ref_path);
  unsigned workers = resolve_workers(config);

  std::vector<std::string> artifacts;
  std::size_t scored = 0;
  for (double sigma : config.noise_sigmas) {
    StabilityReport rep = run_noise_level(labeled, pings, pois, ref, config.params, sigma,
                                          config.seed, workers, config.match_tolerance_s);
    std::string name = "stability_noise_" + csv::format_double(sigma) + ".json";
    write_json_file(resolve_path(config, name), stability_json(config, rep, "noise", sigma));
    artifacts.push_back(name);
    scored += rep.original_count;
    std::fprintf(stderr, "[robustness] noise sigma %s: match %.4f, stable %.4f\n",
                 csv::format_double(sigma).c_str(), rep.match_rate, rep.all.rate());
  }
  for (double rate : config.poi_delete_rates) {
    StabilityReport rep =
        run_poi_level(labeled, pois, ref, config.params, rate, config.seed, workers);
    std::string name = "stability_poi_" + csv::format_double(rate) + ".json";
    write_json_file(resolve_path(config, name), stability_json(config, rep, "poi_deletion", rate));
    artifacts.push_back(name);
    scored += rep.original_count;
    std::fprintf(stderr, "[robustness] poi deletion %s: stable %.4f\n",
                 csv::format_double(rate).c_str(), rep.all.rate());
  }

  // Confidence CDF of the baseline labels, for threshold sensitivity reading.
  std::vector<double> quantiles = confidence_quantiles(labeled);
  std::ofstream cdf = open_csv(resolve_path(config, "confidence_cdf.csv"));
  cdf << "quantile,confidence\n";
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    double q = static_cast<double>(i) / static_cast<double>(quantiles.size() - 1);
    cdf << csv::format_double(q) << ',' << csv::format_double(quantiles[i]) << '\n';
  }
  if (!cdf) fail(ErrorKind::Io, "write failed: confidence_cdf.csv");
  artifacts.push_back("confidence_cdf.csv");

  timer.finish(scored, "staypoints");
  update_manifest(config, "robustness", std::move(artifacts));
}

void cmd_plot_data(const RunConfig& config) {
  ensure_out_dir(config);
  std::string labeled_path = resolve_path(config, config.labeled);
  std::string ref_path = resolve_path(config, config.reference);
  require_input(labeled_path, "infer");
  require_input(ref_path, "synth");

  StageTimer timer("plot-data");
  StaypointCorpus corpus = load_staypoints(labeled_path);
  ReferenceStats ref = load_reference(ref_path);
  LabelHistograms hist = accumulate_histograms(corpus, ref.timezone_offset_min);
  double total = static_cast<double>(hist.total);

  {
    std::ofstream out = open_csv(resolve_path(config, "plot_freq.csv"));
    out << "activity,activity_code,inferred_share,reference_share\n";
    for (Activity a : all_activities()) {
      std::size_t i = index_of(a);
      double inferred = total > 0 ? hist.freq[i] / total : 0.0;
      out << activity_name(a) << ',' << code_of(a) << ',' << csv::format_double(inferred) << ','
          << csv::format_double(ref.activity_shares[i]) << '\n';
    }
    if (!out) fail(ErrorKind::Io, "write failed: plot_freq.csv");
  }
  {
    std::ofstream out = open_csv(resolve_path(config, "plot_start.csv"));
    out << "activity,slot,inferred,reference\n";
    for (Activity a : all_activities()) {
      std::size_t i = index_of(a);
      double sum = 0.0;
      for (double v : hist.start[i]) sum += v;
      for (std::size_t s = 0; s < hist.start[i].size(); ++s) {
        double inferred = sum > 0 ? hist.start[i][s] / sum : 0.0;
        out << activity_name(a) << ',' << s << ',' << csv::format_double(inferred) << ','
            << csv::format_double(ref.start_time_prior[i][s]) << '\n';
      }
    }
    if (!out) fail(ErrorKind::Io, "write failed: plot_start.csv");
  }
  {
    std::ofstream out = open_csv(resolve_path(config, "plot_duration.csv"));
    out << "activity,bin,inferred,reference\n";
    for (Activity a : all_activities()) {
      std::size_t i = index_of(a);
      double sum = 0.0;
      for (double v : hist.duration[i]) sum += v;
      for (std::size_t b = 0; b < hist.duration[i].size(); ++b) {
        double inferred = sum > 0 ? hist.duration[i][b] / sum : 0.0;
        out << activity_name(a) << ',' << b << ',' << csv::format_double(inferred) << ','
            << csv::format_double(ref.duration_prior[i][b]) << '\n';
      }
    }
    if (!out) fail(ErrorKind::Io, "write failed: plot_duration.csv");
  }
  {
    // Stability bars from the robustness stage's reports.
    std::ofstream out = open_csv(resolve_path(config, "plot_stability.csv"));
    out << "kind,level,stratum,value\n";
    auto emit = [&out](const json& j, const char* kind, double level) {
      std::string lv = csv::format_double(level);
      out << kind << ',' << lv << ",match_rate," << csv::format_double(j["match_rate"].get<double>())
          << '\n';
      out << kind << ',' << lv << ",all," << csv::format_double(j["all"]["rate"].get<double>())
          << '\n';
      out << kind << ',' << lv << ",high_confidence,"
          << csv::format_double(j["high_confidence"]["rate"].get<double>()) << '\n';
      out << kind << ',' << lv << ",low_confidence,"
          << csv::format_double(j["low_confidence"]["rate"].get<double>()) << '\n';
      out << kind << ',' << lv << ",weighted_avg,"
          << csv::format_double(j["weighted_avg"].get<double>()) << '\n';
    };
    for (double sigma : config.noise_sigmas) {
      std::string name = "stability_noise_" + csv::format_double(sigma) + ".json";
      std::string path = resolve_path(config, name);
      require_input(path, "robustness");
      emit(load_json_file(path), "noise", sigma);
    }
    for (double rate : config.poi_delete_rates) {
      std::string name = "stability_poi_" + csv::format_double(rate) + ".json";
      std::string path = resolve_path(config, name);
      require_input(path, "robustness");
      emit(load_json_file(path), "poi_deletion", rate);
    }
    if (!out) fail(ErrorKind::Io, "write failed: plot_stability.csv");
  }

  timer.finish(count_points(corpus), "staypoints");
  update_manifest(config, "plot-data",
                  {"plot_freq.csv", "plot_start.csv", "plot_duration.csv", "plot_stability.csv"});
}

}  // namespace tripurpose
