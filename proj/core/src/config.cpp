#include "tripurpose/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string_view>
#include <type_traits>
#include <utility>

#include "tripurpose/csv.hpp"
#include "tripurpose/error.hpp"

namespace tripurpose {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(const std::string& where, std::string_view value) {
  fail(ErrorKind::Config, where + ": bad value '" + std::string(value) + "'");
}

double to_double(std::string_view v, const std::string& where) {
  auto d = csv::try_double(v);
  if (!d) bad_value(where, v);
  return *d;
}

std::int64_t to_int(std::string_view v, const std::string& where) {
  auto i = csv::try_int(v);
  if (!i) bad_value(where, v);
  return *i;
}

std::uint64_t to_u64(std::string_view v, const std::string& where) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(where, v);
  return out;
}

[[maybe_unused]] std::size_t to_size(std::string_view v, const std::string& where) {
  return static_cast<std::size_t>(to_u64(v, where));
}

bool to_bool(std::string_view v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(where, v);
}

std::vector<double> to_list(std::string_view v, const std::string& where) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= v.size()) {
    std::size_t comma = v.find(',', begin);
    if (comma == std::string_view::npos) comma = v.size();
    std::string_view item = trim(v.substr(begin, comma - begin));
    if (item.empty()) bad_value(where, v);
    out.push_back(to_double(item, where));
    begin = comma + 1;
  }
  return out;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::string from_list(std::span<const double> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += csv::format_double(xs[i]);
  }
  return out;
}

std::vector<GeneBounds> default_gene_bounds() {
  std::vector<GeneBounds> out;
  for (const GeneSpec& g : gene_table()) out.push_back({g.lo, g.hi});
  return out;
}

struct Entry {
  std::string section;
  std::string key;
  bool pipeline = false;  // part of params_final.ini
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::vector<Entry> build_table() {
  std::vector<Entry> t;
  auto add = [&t](std::string section, std::string key, bool pipeline, auto set, auto get) {
    t.push_back({std::move(section), std::move(key), pipeline, std::move(set), std::move(get)});
  };
  auto str = [](std::string RunConfig::*field) {
    return std::pair(
        [field](RunConfig& c, std::string_view v, const std::string&) {
          c.*field = std::string(v);
        },
        [field](const RunConfig& c) { return c.*field; });
  };
  auto dbl = [](auto ref) {
    return std::pair(
        [ref](RunConfig& c, std::string_view v, const std::string& w) { ref(c) = to_double(v, w); },
        [ref](const RunConfig& c) { return csv::format_double(ref(const_cast<RunConfig&>(c))); });
  };
  auto num = [](auto ref) {  // any integer-like field via the ref accessor
    return std::pair(
        [ref](RunConfig& c, std::string_view v, const std::string& w) {
          ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(to_u64(v, w));
        },
        [ref](const RunConfig& c) {
          return std::to_string(ref(const_cast<RunConfig&>(c)));
        });
  };

  auto p = [&](auto&& pair, std::string section, std::string key, bool pipeline = false) {
    add(std::move(section), std::move(key), pipeline, pair.first, pair.second);
  };

  p(str(&RunConfig::out_dir), "paths", "out_dir");
  p(str(&RunConfig::pings), "paths", "pings");
  p(str(&RunConfig::pois), "paths", "pois");
  p(str(&RunConfig::reference), "paths", "reference");
  p(str(&RunConfig::staypoints), "paths", "staypoints");
  p(str(&RunConfig::labeled), "paths", "labeled");
  p(str(&RunConfig::params_in), "paths", "params_in");

  p(num([](RunConfig& c) -> std::uint64_t& { return c.seed; }), "run", "seed");
  p(num([](RunConfig& c) -> unsigned& { return c.workers; }), "run", "workers");

  p(dbl([](RunConfig& c) -> double& { return c.params.extraction.d_max_m; }), "extraction",
    "d_max_m", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.extraction.t_min_s; }), "extraction",
    "t_min_s", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.extraction.gap_max_s; }), "extraction",
    "gap_max_s", true);

  p(dbl([](RunConfig& c) -> double& { return c.params.eps_agent_m; }), "clustering", "eps_agent_m",
    true);
  p(num([](RunConfig& c) -> std::size_t& { return c.params.min_pts_agent; }), "clustering",
    "min_pts_agent", true);

  p(dbl([](RunConfig& c) -> double& { return c.params.eps_poi_m; }), "zones", "eps_poi_m", true);
  p(num([](RunConfig& c) -> std::size_t& { return c.params.min_pts_poi; }), "zones", "min_pts_poi",
    true);
  p(dbl([](RunConfig& c) -> double& { return c.params.sigma_m; }), "zones", "sigma_m", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.search_radius_m; }), "zones",
    "search_radius_m", true);

  p(dbl([](RunConfig& c) -> double& { return c.params.caps.at(Activity::Home); }), "bidding",
    "tau_home", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.caps.at(Activity::Work); }), "bidding",
    "tau_work", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.caps.at(Activity::School); }), "bidding",
    "tau_school", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.exist_frac; }), "bidding", "exist_frac",
    true);
  add("bidding", "per_activity_bidding", true,
      [](RunConfig& c, std::string_view v, const std::string& w) {
        c.params.per_activity_bidding = to_bool(v, w);
      },
      [](const RunConfig& c) { return from_bool(c.params.per_activity_bidding); });

  p(dbl([](RunConfig& c) -> double& { return c.params.scoring.eps; }), "scoring", "eps", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.scoring.alpha_short; }), "scoring",
    "alpha_short", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.scoring.alpha_mid; }), "scoring",
    "alpha_mid", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.scoring.alpha_long; }), "scoring",
    "alpha_long", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.scoring.delta; }), "scoring", "delta", true);
  add("scoring", "short_bin_cutoff", true,
      [](RunConfig& c, std::string_view v, const std::string& w) {
        c.params.scoring.short_bin_cutoff = static_cast<int>(to_int(v, w));
      },
      [](const RunConfig& c) { return std::to_string(c.params.scoring.short_bin_cutoff); });

  p(dbl([](RunConfig& c) -> double& { return c.params.gamma_margin; }), "confidence",
    "gamma_margin", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.gamma_posterior; }), "confidence",
    "gamma_posterior", true);
  p(dbl([](RunConfig& c) -> double& { return c.params.hcr_threshold; }), "confidence",
    "hcr_threshold", true);

  p(num([](RunConfig& c) -> std::size_t& { return c.calibration.nsga.population; }), "calibration",
    "population");
  p(num([](RunConfig& c) -> std::size_t& { return c.calibration.generations[0]; }), "calibration",
    "generations_phase1");
  p(num([](RunConfig& c) -> std::size_t& { return c.calibration.generations[1]; }), "calibration",
    "generations_phase2");
  p(num([](RunConfig& c) -> std::size_t& { return c.calibration.generations[2]; }), "calibration",
    "generations_phase3");
  p(dbl([](RunConfig& c) -> double& { return c.calibration.nsga.crossover_prob; }), "calibration",
    "crossover_prob");
  p(dbl([](RunConfig& c) -> double& { return c.calibration.nsga.sbx_eta; }), "calibration",
    "sbx_eta");
  p(dbl([](RunConfig& c) -> double& { return c.calibration.nsga.mutation_eta; }), "calibration",
    "mutation_eta");
  p(num([](RunConfig& c) -> std::size_t& { return c.calibration.subsample_agents; }), "calibration",
    "subsample_agents");
  // One search-box key per calibratable parameter, value "lo:hi".
  {
    auto table = gene_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
      add("calibration", "bound_" + std::string(table[i].name), false,
          [i](RunConfig& c, std::string_view v, const std::string& w) {
            std::size_t colon = v.find(':');
            if (colon == std::string_view::npos) bad_value(w, v);
            GeneBounds b{to_double(trim(v.substr(0, colon)), w),
                         to_double(trim(v.substr(colon + 1)), w)};
            if (c.calibration.gene_bounds.empty()) {
              c.calibration.gene_bounds = default_gene_bounds();
            }
            c.calibration.gene_bounds[i] = b;
          },
          [i](const RunConfig& c) {
            GeneBounds b{gene_table()[i].lo, gene_table()[i].hi};
            if (!c.calibration.gene_bounds.empty()) b = c.calibration.gene_bounds[i];
            return csv::format_double(b.lo) + ":" + csv::format_double(b.hi);
          });
    }
  }

  add("robustness", "noise_sigmas", false,
      [](RunConfig& c, std::string_view v, const std::string& w) {
        c.noise_sigmas = to_list(v, w);
      },
      [](const RunConfig& c) { return from_list(c.noise_sigmas); });
  add("robustness", "poi_delete_rates", false,
      [](RunConfig& c, std::string_view v, const std::string& w) {
        c.poi_delete_rates = to_list(v, w);
      },
      [](const RunConfig& c) { return from_list(c.poi_delete_rates); });
  add("robustness", "match_tolerance_s", false,
      [](RunConfig& c, std::string_view v, const std::string& w) {
        c.match_tolerance_s = to_int(v, w);
      },
      [](const RunConfig& c) { return std::to_string(c.match_tolerance_s); });

  p(num([](RunConfig& c) -> std::size_t& { return c.synth.agents; }), "synth", "agents");
  p(num([](RunConfig& c) -> int& { return c.synth.days; }), "synth", "days");
  p(dbl([](RunConfig& c) -> double& { return c.synth.lat_min; }), "synth", "lat_min");
  p(dbl([](RunConfig& c) -> double& { return c.synth.lat_max; }), "synth", "lat_max");
  p(dbl([](RunConfig& c) -> double& { return c.synth.lon_min; }), "synth", "lon_min");
  p(dbl([](RunConfig& c) -> double& { return c.synth.lon_max; }), "synth", "lon_max");
  p(dbl([](RunConfig& c) -> double& { return c.synth.gps_noise_m; }), "synth", "gps_noise_m");
  p(num([](RunConfig& c) -> int& { return c.synth.cadence_min_s; }), "synth", "cadence_min_s");
  p(num([](RunConfig& c) -> int& { return c.synth.cadence_max_s; }), "synth", "cadence_max_s");
  p(dbl([](RunConfig& c) -> double& { return c.synth.p_work; }), "synth", "p_work");
  p(dbl([](RunConfig& c) -> double& { return c.synth.p_school; }), "synth", "p_school");
  p(dbl([](RunConfig& c) -> double& { return c.synth.attendance; }), "synth", "attendance");
  p(dbl([](RunConfig& c) -> double& { return c.synth.nm_rate; }), "synth", "nm_rate");
  p(num([](RunConfig& c) -> int& { return c.synth.nm_cap; }), "synth", "nm_cap");
  p(dbl([](RunConfig& c) -> double& { return c.synth.amb_frac; }), "synth", "amb_frac");
  p(num([](RunConfig& c) -> std::size_t& { return c.synth.agents_per_worksite; }), "synth",
    "agents_per_worksite");
  p(num([](RunConfig& c) -> std::size_t& { return c.synth.agents_per_school; }), "synth",
    "agents_per_school");
  p(num([](RunConfig& c) -> std::size_t& { return c.synth.pois_per_site; }), "synth",
    "pois_per_site");

  return t;
}

const std::vector<Entry>& table() {
  static const std::vector<Entry> t = build_table();
  return t;
}

const Entry* find_entry(std::string_view section, std::string_view key) {
  for (const Entry& e : table()) {
    if (e.section == section && e.key == key) return &e;
  }
  return nullptr;
}

// Applies one parsed key=value; pipeline_only restricts to params_final keys.
void apply_kv(RunConfig& config, std::string_view section, std::string_view key,
              std::string_view value, const std::string& where, bool pipeline_only) {
  const Entry* e = find_entry(section, key);
  if (e == nullptr) {
    fail(ErrorKind::Config,
         where + ": unknown key '" + std::string(section) + "." + std::string(key) + "'");
  }
  if (pipeline_only && !e->pipeline) {
    fail(ErrorKind::Config, where + ": '" + std::string(section) + "." + std::string(key) +
                                "' is not a pipeline parameter");
  }
  e->set(config, value, where);
}

void parse_ini(RunConfig& config, const std::string& path, bool pipeline_only) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    std::string where = path + ":" + std::to_string(line_no);
    if (s.front() == '[') {
      if (s.back() != ']') fail(ErrorKind::Config, where + ": unterminated section header");
      section = std::string(trim(s.substr(1, s.size() - 2)));
      if (section.empty()) fail(ErrorKind::Config, where + ": empty section name");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Config, where + ": expected key = value");
    }
    std::string_view key = trim(s.substr(0, eq));
    std::string_view value = trim(s.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::Config, where + ": empty key");
    if (section.empty()) {
      fail(ErrorKind::Config, where + ": key '" + std::string(key) + "' before any [section]");
    }
    apply_kv(config, section, key, value, where, pipeline_only);
  }
}

}  // namespace

RunConfig load_run_config(const std::string& path, std::span<const std::string> overrides) {
  RunConfig config;
  if (!path.empty()) parse_ini(config, path, false);
  for (const std::string& ov : overrides) {
    std::string where = "override '" + ov + "'";
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected section.key=value");
    std::string_view lhs = trim(std::string_view(ov).substr(0, eq));
    std::string_view value = trim(std::string_view(ov).substr(eq + 1));
    std::size_t dot = lhs.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot == lhs.size() - 1) {
      fail(ErrorKind::Config, where + ": expected section.key=value");
    }
    apply_kv(config, lhs.substr(0, dot), lhs.substr(dot + 1), value, where, false);
  }
  if (!config.params_in.empty()) {
    std::filesystem::path p(config.params_in);
    if (p.is_relative()) p = std::filesystem::path(config.out_dir) / p;
    apply_params_ini(config, p.string());
  }
  config.config_hash = hash_config(config);
  return config;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Entry& e : table()) {
    out += e.section;
    out += '.';
    out += e.key;
    out += " = ";
    out += e.get(config);
    out += '\n';
  }
  return out;
}

std::uint64_t hash_config(const RunConfig& config) {
  std::string text = serialize_config(config);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_params_ini(const std::string& path, const PipelineParams& params) {
  RunConfig carrier;
  carrier.params = params;
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  std::string section;
  for (const Entry& e : table()) {
    if (!e.pipeline) continue;
    if (e.section != section) {
      if (!section.empty()) out << '\n';
      section = e.section;
      out << '[' << section << "]\n";
    }
    out << e.key << " = " << e.get(carrier) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

void apply_params_ini(RunConfig& config, const std::string& path) {
  parse_ini(config, path, true);
}

}  // namespace tripurpose
