#include "tripurpose/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "tripurpose/error.hpp"
#include "tripurpose/extraction.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/pipeline.hpp"
#include "tripurpose/rng.hpp"

namespace tripurpose {

namespace {

void require_labeled(const StaypointCorpus& corpus, const char* which) {
  for (const auto& agent : corpus) {
    for (const auto& sp : agent.points) {
      if (!sp.labeled() || !sp.confidence) {
        fail(ErrorKind::IncompleteInference,
             std::string(which) + " corpus has an unlabeled staypoint (agent " + agent.agent_id +
                 ")");
      }
    }
  }
}

std::size_t point_count(const StaypointCorpus& corpus) {
  std::size_t n = 0;
  for (const auto& agent : corpus) n += agent.points.size();
  return n;
}

}  // namespace

PingCorpus perturb_pings(const PingCorpus& pings, double sigma_m, std::uint64_t seed) {
  if (sigma_m < 0.0) fail(ErrorKind::Config, "noise sigma must be non-negative");
  if (sigma_m == 0.0) return pings;

  PingCorpus out = pings;
  for (std::size_t ai = 0; ai < out.size(); ++ai) {
    Rng rng = Rng::stream(seed, ai);
    for (RawPing& ping : out[ai].pings) {
      double east = rng.normal(0.0, sigma_m);
      double north = rng.normal(0.0, sigma_m);
      ping.location = offset_by_meters(ping.location, east, north);
    }
  }
  return out;
}

std::vector<Poi> delete_pois(std::span<const Poi> pois, double rate, std::uint64_t seed) {
  if (rate < 0.0 || rate >= 1.0) fail(ErrorKind::Config, "deletion rate must lie in [0,1)");
  std::vector<Poi> out(pois.begin(), pois.end());
  if (rate == 0.0 || pois.empty()) return out;

  // ceil((1-rate)*n), guarded against the product landing epsilon above an
  // integer (0.9*1000 must keep exactly 900).
  double target = (1.0 - rate) * static_cast<double>(pois.size());
  auto keep = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
  keep = std::min(keep, pois.size());

  std::vector<std::size_t> order(pois.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng::stream(seed, 0x706f69);
  for (std::size_t i = 0; i < keep; ++i) {
    auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size() - 1)));
    std::swap(order[i], order[j]);
  }
  order.resize(keep);
  std::sort(order.begin(), order.end());

  std::vector<Poi> kept;
  kept.reserve(keep);
  for (std::size_t idx : order) kept.push_back(out[idx]);
  return kept;
}

StabilityReport match_and_score(const StaypointCorpus& original, const StaypointCorpus& perturbed,
                                long tolerance_s) {
  if (tolerance_s < 0) fail(ErrorKind::Config, "match tolerance must be non-negative");
  require_labeled(original, "original");
  require_labeled(perturbed, "perturbed");

  StabilityReport report;
  report.original_count = point_count(original);
  report.perturbed_count = point_count(perturbed);
  if (report.original_count == 0) fail(ErrorKind::EmptyCorpus, "original corpus is empty");

  std::unordered_map<std::string_view, std::size_t> perturbed_agents;
  perturbed_agents.reserve(perturbed.size());
  for (std::size_t i = 0; i < perturbed.size(); ++i) {
    perturbed_agents.emplace(perturbed[i].agent_id, i);
  }

  for (const auto& agent : original) {
    auto it = perturbed_agents.find(agent.agent_id);
    if (it == perturbed_agents.end()) continue;
    const auto& pp = perturbed[it->second].points;

    // Greedy in time order: both sides are sorted by start time, each
    // perturbed point matches at most once, the earliest qualifying one wins.
    std::vector<char> used(pp.size(), 0);
    std::size_t window = 0;
    for (const Staypoint& o : agent.points) {
      while (window < pp.size() && pp[window].t_start < o.t_start - tolerance_s) ++window;
      for (std::size_t k = window; k < pp.size() && pp[k].t_start <= o.t_start + tolerance_s; ++k) {
        if (used[k]) continue;
        if (std::llabs(pp[k].t_end - o.t_end) > tolerance_s) continue;
        used[k] = 1;

        bool stable = *pp[k].label == *o.label;
        auto bump = [&](StabilityCell& cell) {
          ++cell.matched;
          if (stable) ++cell.stable;
        };
        bump(report.all);
        if (*o.confidence >= 0.5) bump(report.high_confidence);
        if (*o.confidence < 0.3) bump(report.low_confidence);
        bump(report.by_activity[index_of(*o.label)]);
        break;
      }
    }
  }

  report.matched = report.all.matched;
  report.match_rate =
      static_cast<double>(report.matched) / static_cast<double>(report.original_count);
  if (report.matched > 0) {
    for (const StabilityCell& cell : report.by_activity) {
      double share = static_cast<double>(cell.matched) / static_cast<double>(report.matched);
      report.weighted_avg += share * cell.rate();
    }
  }
  return report;
}

StabilityReport run_noise_level(const StaypointCorpus& original_labeled, const PingCorpus& pings,
                                std::span<const Poi> pois, const ReferenceStats& ref,
                                const PipelineParams& params, double sigma_m, std::uint64_t seed,
                                unsigned workers, long tolerance_s) {
  PingCorpus noisy = perturb_pings(pings, sigma_m, seed);
  StaypointCorpus staypoints = extract_corpus(noisy, params.extraction);
  LabelingResult relabeled = label_corpus(staypoints, pois, ref, params, workers);
  return match_and_score(original_labeled, relabeled.labeled, tolerance_s);
}

StabilityReport run_poi_level(const StaypointCorpus& original_labeled, std::span<const Poi> pois,
                              const ReferenceStats& ref, const PipelineParams& params, double rate,
                              std::uint64_t seed, unsigned workers) {
  std::vector<Poi> thinned = delete_pois(pois, rate, seed);
  LabelingResult relabeled = label_corpus(original_labeled, thinned, ref, params, workers);
  return match_and_score(original_labeled, relabeled.labeled);
}

std::vector<double> confidence_quantiles(const StaypointCorpus& labeled, std::size_t points) {
  if (points < 2) fail(ErrorKind::Config, "quantile export needs at least two points");
  require_labeled(labeled, "labeled");

  std::vector<double> conf;
  for (const auto& agent : labeled) {
    for (const auto& sp : agent.points) conf.push_back(*sp.confidence);
  }
  if (conf.empty()) fail(ErrorKind::EmptyCorpus, "no staypoints to summarize");
  std::sort(conf.begin(), conf.end());

  std::vector<double> quantiles(points);
  for (std::size_t k = 0; k < points; ++k) {
    std::size_t idx = k * (conf.size() - 1) / (points - 1);
    quantiles[k] = conf[idx];
  }
  return quantiles;
}

}  // namespace tripurpose
