#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "tripurpose/csv.hpp"

#include "tripurpose/geo.hpp"
#include "tripurpose/prob_vector.hpp"
#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {

struct RawPing {
  Instant timestamp = 0;  // UTC seconds
  LatLon location{};
};

struct AgentPings {
  std::string agent_id;
  std::vector<RawPing> pings;  // time-sorted after load
};

using PingCorpus = std::vector<AgentPings>;

struct Poi {
  std::string poi_id;
  LatLon location{};
  ProbVector activity_dist{};
  std::string category;  // empty when the row carried an explicit distribution
};

// Row bookkeeping for loaders that skip bad input instead of aborting.
struct LoadStats {
  std::size_t rows = 0;
  std::size_t skipped = 0;   // malformed rows
  std::size_t unmapped = 0;  // POIs with unknown category and no distribution
};

// pings.csv: agent_id,timestamp_utc,lat,lon[,accuracy_m]. Rows are grouped by
// agent (file order of first appearance) and sorted by time within each agent.
// Malformed rows are skipped and counted; more than 10% malformed aborts.
PingCorpus load_pings(const std::string& path, LoadStats* stats = nullptr);
void write_pings(const std::string& path, const PingCorpus& corpus);

// pois.csv: poi_id,lat,lon,category[,p1..p15]. Explicit distributions win over
// the category table; unknown categories without one are skipped and counted.
std::vector<Poi> load_pois(const std::string& path, LoadStats* stats = nullptr);
void write_pois(const std::string& path, const std::vector<Poi>& pois);

// reference.stats: [TZ_OFFSET_MIN], [SHARES], [START], [DURATION] sections.
// Histogram rows are renormalized; an all-zero row is kept zero and flagged.
ReferenceStats load_reference(const std::string& path);
void write_reference(const std::string& path, const ReferenceStats& ref);

// staypoints.csv: agent_id,lat,lon,t_start,t_end,duration_s and the labeled
// variant with activity_code,confidence appended. Loading auto-detects the
// header; these are our own artifacts, so any bad row aborts.
void write_staypoints(const std::string& path, const StaypointCorpus& corpus);
StaypointCorpus load_staypoints(const std::string& path);

// Streams pings one agent at a time so extraction never holds the whole
// corpus in memory. Rows must be grouped by agent; an agent id reappearing
// after another agent's block aborts. Malformed rows are skipped and counted
// exactly like load_pings, including the 10% abort at end of file.
class PingStreamReader {
 public:
  explicit PingStreamReader(const std::string& path);

  // Fills `out` with the next agent's time-sorted pings; false at end of file.
  bool next_agent(AgentPings& out);

  const LoadStats& stats() const { return stats_; }

 private:
  bool next_row(std::string& agent_id, RawPing& ping);

  csv::LineReader reader_;
  LoadStats stats_;
  std::string pending_agent_;
  RawPing pending_ping_{};
  bool has_pending_ = false;
  bool done_ = false;
  std::unordered_set<std::string> finished_agents_;
};

}  // namespace tripurpose
