#include "tripurpose/zones.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tripurpose/csv.hpp"
#include "tripurpose/dbscan.hpp"
#include "tripurpose/error.hpp"

namespace tripurpose {

std::vector<SemanticZone> build_zones(std::span<const Poi> pois, double eps_poi_m,
                                      std::size_t min_pts_poi) {
  if (pois.empty()) fail(ErrorKind::EmptyCorpus, "no POIs to cluster into zones");

  std::vector<LatLon> points;
  points.reserve(pois.size());
  for (const auto& poi : pois) points.push_back(poi.location);
  std::vector<int> labels = dbscan_labels(points, eps_poi_m, min_pts_poi);

  int n_zones = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<SemanticZone> zones(static_cast<std::size_t>(n_zones));
  std::vector<ProbVector> sums(static_cast<std::size_t>(n_zones), ProbVector{});
  for (std::size_t i = 0; i < pois.size(); ++i) {
    auto z = static_cast<std::size_t>(labels[i]);
    zones[z].zone_id = labels[i];
    zones[z].centroid.lat += pois[i].location.lat;
    zones[z].centroid.lon += pois[i].location.lon;
    ++zones[z].member_count;
    for (std::size_t a = 0; a < kActivityCount; ++a) sums[z][a] += pois[i].activity_dist[a];
  }
  for (std::size_t z = 0; z < zones.size(); ++z) {
    auto n = static_cast<double>(zones[z].member_count);
    zones[z].centroid.lat /= n;
    zones[z].centroid.lon /= n;
    zones[z].dist = normalize(sums[z]);
  }
  for (std::size_t i = 0; i < pois.size(); ++i) {
    auto z = static_cast<std::size_t>(labels[i]);
    zones[z].radius_m =
        std::max(zones[z].radius_m, haversine_m(pois[i].location, zones[z].centroid));
  }
  return zones;
}

void write_zones(const std::string& path, std::span<const SemanticZone> zones) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << "zone_id,lat,lon,radius_m,member_count";
  for (int i = 1; i <= static_cast<int>(kActivityCount); ++i) out << ",p" << i;
  out << '\n';
  for (const auto& z : zones) {
    out << z.zone_id << ',' << csv::format_double(z.centroid.lat) << ','
        << csv::format_double(z.centroid.lon) << ',' << csv::format_double(z.radius_m) << ','
        << z.member_count;
    for (double p : z.dist) out << ',' << csv::format_double(p);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

namespace {

std::vector<LatLon> zone_centroids(const std::vector<SemanticZone>& zones) {
  std::vector<LatLon> centroids;
  centroids.reserve(zones.size());
  for (const auto& z : zones) centroids.push_back(z.centroid);
  return centroids;
}

}  // namespace

ZoneIndex::ZoneIndex(std::vector<SemanticZone> zones, double sigma_m, double search_radius_m)
    : zones_(std::move(zones)), centroids_(zone_centroids(zones_)), sigma_m_(sigma_m),
      search_radius_m_(search_radius_m), grid_(centroids_, search_radius_m) {
  if (!(sigma_m_ > 0.0)) fail(ErrorKind::Config, "zone kernel bandwidth must be positive");
  if (!(search_radius_m_ > 0.0)) fail(ErrorKind::Config, "zone search radius must be positive");
}

template <typename ZoneVisitor>
ProbVector ZoneIndex::accumulate(LatLon l, bool* flagged, ZoneVisitor&& visit) const {
  ProbVector acc{};
  bool any_in_range = false;
  double inv_two_sigma_sq = 1.0 / (2.0 * sigma_m_ * sigma_m_);
  visit([&](std::size_t zi) {
    double d = haversine_m(l, centroids_[zi]);
    if (d > search_radius_m_) return;
    any_in_range = true;
    double w = std::exp(-d * d * inv_two_sigma_sq);
    for (std::size_t a = 0; a < kActivityCount; ++a) acc[a] += w * zones_[zi].dist[a];
  });
  if (flagged) *flagged = !any_in_range;
  if (!any_in_range || !(acc.sum() > 0.0)) return uniform_prob_vector();
  return normalize(acc);
}

ProbVector ZoneIndex::spatial_likelihood(LatLon l, bool* flagged) const {
  return accumulate(l, flagged, [&](auto&& per_zone) {
    grid_.for_candidates(l, [&](std::uint32_t zi) { per_zone(static_cast<std::size_t>(zi)); });
  });
}

ProbVector ZoneIndex::spatial_likelihood_linear(LatLon l, bool* flagged) const {
  return accumulate(l, flagged, [&](auto&& per_zone) {
    for (std::size_t zi = 0; zi < zones_.size(); ++zi) per_zone(zi);
  });
}

}  // namespace tripurpose
