#include "tripurpose/extraction.hpp"

#include <algorithm>
#include <cmath>

#include "tripurpose/dbscan.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {
namespace {

struct Episode {
  double lat_sum = 0.0;
  double lon_sum = 0.0;
  std::size_t count = 0;
  Instant t_first = 0;
  Instant t_last = 0;

  LatLon centroid() const {
    return {lat_sum / static_cast<double>(count), lon_sum / static_cast<double>(count)};
  }

  void start(const RawPing& p) {
    lat_sum = p.location.lat;
    lon_sum = p.location.lon;
    count = 1;
    t_first = t_last = p.timestamp;
  }

  void add(const RawPing& p) {
    lat_sum += p.location.lat;
    lon_sum += p.location.lon;
    ++count;
    t_last = p.timestamp;
  }
};

}  // namespace

std::vector<Staypoint> extract_staypoints(std::span<const RawPing> pings,
                                          const ExtractionParams& params) {
  std::vector<Staypoint> out;
  if (pings.empty()) return out;

  Episode ep;
  auto close = [&] {
    if (static_cast<double>(ep.t_last - ep.t_first) >= params.t_min_s) {
      out.push_back({ep.centroid(), ep.t_first, ep.t_last, {}, {}});
    }
  };

  ep.start(pings.front());
  for (const RawPing& p : pings.subspan(1)) {
    bool gap = static_cast<double>(p.timestamp - ep.t_last) > params.gap_max_s;
    if (!gap && haversine_m(p.location, ep.centroid()) <= params.d_max_m) {
      ep.add(p);
    } else {
      close();
      ep.start(p);
    }
  }
  close();
  return out;
}

StaypointCorpus extract_corpus(const PingCorpus& corpus, const ExtractionParams& params) {
  StaypointCorpus out;
  out.reserve(corpus.size());
  for (const auto& agent : corpus) {
    out.push_back({agent.agent_id, extract_staypoints(agent.pings, params)});
  }
  return out;
}

std::vector<CandidateLocation> cluster_agent_staypoints(std::span<const Staypoint> staypoints,
                                                        double eps_agent_m, std::size_t min_pts,
                                                        int timezone_offset_min) {
  std::vector<CandidateLocation> locations;
  if (staypoints.empty()) return locations;

  std::vector<LatLon> points;
  points.reserve(staypoints.size());
  for (const auto& sp : staypoints) points.push_back(sp.location);
  std::vector<int> labels = dbscan_labels(points, eps_agent_m, min_pts);

  int n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  locations.resize(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < staypoints.size(); ++i) {
    auto& loc = locations[static_cast<std::size_t>(labels[i])];
    loc.location_id = labels[i];
    loc.members.push_back(i);
  }

  for (auto& loc : locations) {
    double weight_total = 0.0;
    double lat_acc = 0.0;
    double lon_acc = 0.0;
    for (std::size_t i : loc.members) {
      const auto& sp = staypoints[i];
      // Zero-length episodes can appear when t_min is configured to 0; give
      // them unit weight so the centroid stays defined.
      double w = std::max(1.0, static_cast<double>(sp.duration_s()));
      weight_total += w;
      lat_acc += w * sp.location.lat;
      lon_acc += w * sp.location.lon;
      Instant first_day = local_day(sp.t_start, timezone_offset_min);
      Instant last_day = local_day(sp.t_end - 1, timezone_offset_min);
      for (Instant d = first_day; d <= last_day; ++d) loc.visit_days.push_back(d);
    }
    loc.centroid = {lat_acc / weight_total, lon_acc / weight_total};
    std::sort(loc.visit_days.begin(), loc.visit_days.end());
    loc.visit_days.erase(std::unique(loc.visit_days.begin(), loc.visit_days.end()),
                         loc.visit_days.end());
    loc.candidate = loc.visit_days.size() >= 2;
    for (std::size_t i : loc.members) {
      loc.radius_m = std::max(loc.radius_m, haversine_m(staypoints[i].location, loc.centroid));
    }
  }
  return locations;
}

}  // namespace tripurpose
