#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tripurpose/activity.hpp"
#include "tripurpose/ingest.hpp"
#include "tripurpose/params.hpp"
#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

// One stability stratum: how many matched pairs landed in it and how many of
// those kept their original label.
struct StabilityCell {
  std::size_t matched = 0;
  std::size_t stable = 0;

  double rate() const {
    return matched == 0 ? 0.0 : static_cast<double>(stable) / static_cast<double>(matched);
  }
};

// Label agreement between a baseline labeled corpus and a perturbed rerun.
// Strata use the BASELINE run's confidence and activity; the band [0.3, 0.5)
// belongs to neither confidence stratum. weighted_avg re-derives the overall
// rate as the matched-share-weighted mean of the per-activity rates.
struct StabilityReport {
  std::size_t original_count = 0;
  std::size_t perturbed_count = 0;
  std::size_t matched = 0;
  double match_rate = 0.0;

  StabilityCell all;
  StabilityCell high_confidence;  // baseline confidence >= 0.5
  StabilityCell low_confidence;   // baseline confidence < 0.3
  std::array<StabilityCell, kActivityCount> by_activity{};
  double weighted_avg = 0.0;
};

// Displaces every ping by an independent isotropic 2-D Gaussian (sigma in
// meters, converted to degrees at the ping's latitude). Timestamps are
// untouched. Per-agent generator streams keyed by the agent's position make
// the result independent of worker count; sigma 0 returns the input verbatim.
PingCorpus perturb_pings(const PingCorpus& pings, double sigma_m, std::uint64_t seed);

// Keeps a uniformly random subset of exactly ceil((1-rate)*n) POIs, in their
// original order. rate must lie in [0,1); rate 0 returns the input verbatim.
std::vector<Poi> delete_pois(std::span<const Poi> pois, double rate, std::uint64_t seed);

// Joins two fully labeled corpora on (agent_id, t_start, t_end) and scores
// label agreement. tolerance_s widens the time match symmetrically; with the
// default 0 the join is exact. Matching is greedy in time order and each
// perturbed staypoint is consumed at most once.
StabilityReport match_and_score(const StaypointCorpus& original, const StaypointCorpus& perturbed,
                                long tolerance_s = 0);

// Positional-noise experiment at one sigma level: perturb the pings,
// re-extract staypoints, relabel, and score against the baseline labels.
StabilityReport run_noise_level(const StaypointCorpus& original_labeled, const PingCorpus& pings,
                                std::span<const Poi> pois, const ReferenceStats& ref,
                                const PipelineParams& params, double sigma_m, std::uint64_t seed,
                                unsigned workers = 1, long tolerance_s = 0);

// POI-deletion experiment at one rate: relabel the same staypoints against
// the thinned POI set and score against the baseline labels. The staypoints
// are identical, so the match rate is 1 by construction.
StabilityReport run_poi_level(const StaypointCorpus& original_labeled, std::span<const Poi> pois,
                              const ReferenceStats& ref, const PipelineParams& params, double rate,
                              std::uint64_t seed, unsigned workers = 1);

// Evenly spaced quantiles (inclusive of min and max) of the labeled corpus's
// confidences - the confidence CDF exported alongside the stability reports.
std::vector<double> confidence_quantiles(const StaypointCorpus& labeled, std::size_t points = 101);

}  // namespace tripurpose
