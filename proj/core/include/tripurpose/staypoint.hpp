#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tripurpose/activity.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {

// One stationary episode. Immutable after extraction except for the label
// and confidence filled in by the inference stages (present together or not
// at all).
struct Staypoint {
  LatLon location;
  Instant t_start = 0;
  Instant t_end = 0;
  std::optional<Activity> label;
  std::optional<double> confidence;

  std::int64_t duration_s() const { return t_end - t_start; }
  bool labeled() const { return label.has_value(); }
};

struct AgentStaypoints {
  std::string agent_id;
  std::vector<Staypoint> points;
};

using StaypointCorpus = std::vector<AgentStaypoints>;

inline std::size_t corpus_size(const StaypointCorpus& corpus) {
  std::size_t n = 0;
  for (const auto& agent : corpus) n += agent.points.size();
  return n;
}

}  // namespace tripurpose
