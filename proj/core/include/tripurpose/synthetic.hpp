#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tripurpose/activity.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/ingest.hpp"
#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

// Desk-scale corpus generator with known ground truth. Agents live on a
// shared site layout: every agent gets a home, workers and students get a
// shared weekday anchor site, and non-mandatory visits go to typed POI
// clusters (or deliberately mixed-use "plaza" sites for the ambiguous share).
// Anchor sites sit at least several hundred meters apart so consecutive
// visits always break staypoint episodes; pings land exactly on episode
// boundaries so extracted staypoints carry the planted timestamps.
struct SynthConfig {
  std::size_t agents = 5000;
  int days = 14;  // corpus starts on a Monday

  double lat_min = 33.9;
  double lat_max = 34.1;
  double lon_min = -118.5;
  double lon_max = -118.2;

  double gps_noise_m = 15.0;  // per-ping Gaussian around the visit anchor
  int cadence_min_s = 60;     // ping spacing, uniform in [min,max]
  int cadence_max_s = 300;

  double p_work = 0.65;    // agent role probabilities (disjoint)
  double p_school = 0.08;
  double attendance = 0.9;  // weekday probability of visiting the anchor

  double nm_rate = 1.45;   // mean non-mandatory visits per day (truncated Poisson)
  int nm_cap = 5;
  double amb_frac = 0.25;  // fraction of NM visits at mixed-use plaza sites

  std::size_t agents_per_worksite = 25;
  std::size_t agents_per_school = 100;
  std::size_t pois_per_site = 5;  // single-type clusters and offices

  ReferenceStats ref;  // priors sampled from; defaults to the shipped ones

  SynthConfig() : ref(default_reference_stats()) {}
  void validate() const;
};

// One planted visit; extracted staypoints should reproduce (t_start, t_end).
struct TruthVisit {
  Instant t_start = 0;
  Instant t_end = 0;
  Activity activity = Activity::Home;
  LatLon anchor{};
};

struct AgentTruth {
  std::string agent_id;
  LatLon home{};
  std::optional<Activity> second_type;  // Work or School
  LatLon second{};                      // valid iff second_type is set
  std::vector<TruthVisit> visits;       // time-ordered
};

struct SyntheticGroundTruth {
  std::vector<AgentTruth> agents;
};

struct SyntheticCorpus {
  PingCorpus pings;
  std::vector<Poi> pois;
  SyntheticGroundTruth truth;
};

SyntheticCorpus generate_synthetic(const SynthConfig& config, std::uint64_t seed,
                                   unsigned workers = 1);

// Closed-form expectation of the visit-label distribution the generator
// produces under `config` - the target the sampled label frequencies converge
// to. Derived from the day-template probabilities, not from a sample run.
std::array<double, kActivityCount> expected_visit_shares(const SynthConfig& config);

// truth.csv: agent_id,t_start,t_end,activity_code,lat,lon (one row per visit).
void write_truth(const std::string& path, const SyntheticGroundTruth& truth);
SyntheticGroundTruth load_truth(const std::string& path);

// anchors.csv: agent_id,home_lat,home_lon,second_code,second_lat,second_lon
// (second_code 0 when the agent has no second anchor).
void write_anchors(const std::string& path, const SyntheticGroundTruth& truth);

}  // namespace tripurpose
