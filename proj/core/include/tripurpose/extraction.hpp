#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tripurpose/ingest.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

struct ExtractionParams {
  double d_max_m = 200.0;    // max distance from a ping to the running centroid
  double t_min_s = 300.0;    // min dwell span to keep an episode
  double gap_max_s = 3600.0; // ping gap that force-closes an episode
};

// Greedy dwell segmentation: an episode grows while pings stay within d_max_m
// of its running centroid and arrive within gap_max_s of the previous ping;
// episodes spanning at least t_min_s become staypoints located at the mean of
// their pings. Pings must be time-sorted.
std::vector<Staypoint> extract_staypoints(std::span<const RawPing> pings,
                                          const ExtractionParams& params);

StaypointCorpus extract_corpus(const PingCorpus& corpus, const ExtractionParams& params);

// A recurrent place visited by one agent: a density cluster of staypoints
// with a duration-weighted centroid. Only locations seen on at least two
// distinct local calendar days may enter mandatory bidding.
struct CandidateLocation {
  int location_id = 0;                    // dense, first-visit order
  LatLon centroid{};                      // duration-weighted member mean
  double radius_m = 0.0;                  // max member distance to centroid
  std::vector<std::size_t> members;       // indices into the agent's staypoints
  std::vector<std::int64_t> visit_days;   // sorted distinct local days
  bool candidate = false;                 // |visit_days| >= 2
};

// Clusters one agent's staypoints (haversine density clustering, min_pts
// defaults to 1 so this is connected components). Downstream inference uses
// the centroid as each member's effective location to cancel GPS noise.
std::vector<CandidateLocation> cluster_agent_staypoints(std::span<const Staypoint> staypoints,
                                                        double eps_agent_m, std::size_t min_pts,
                                                        int timezone_offset_min);

}  // namespace tripurpose
