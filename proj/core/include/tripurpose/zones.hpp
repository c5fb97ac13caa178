#pragma once

#include <span>
#include <string>
#include <vector>

#include "tripurpose/geo.hpp"
#include "tripurpose/geo_grid.hpp"
#include "tripurpose/ingest.hpp"
#include "tripurpose/prob_vector.hpp"

namespace tripurpose {

// A density cluster of POIs acting as one semantic place: its activity
// distribution is the normalized sum of member distributions.
struct SemanticZone {
  int zone_id = 0;
  LatLon centroid{};       // unweighted member mean
  double radius_m = 0.0;   // max member distance to centroid (diagnostics)
  ProbVector dist{};
  std::size_t member_count = 0;
};

// Haversine density clustering of POIs; isolated POIs become singleton zones,
// so every POI lands in exactly one zone.
std::vector<SemanticZone> build_zones(std::span<const Poi> pois, double eps_poi_m,
                                      std::size_t min_pts_poi);

void write_zones(const std::string& path, std::span<const SemanticZone> zones);

// Immutable radius-query structure over zone centroids answering
// distance-weighted activity likelihoods: each zone within the search radius
// contributes its distribution scaled by exp(-d^2 / (2 sigma^2)).
class ZoneIndex {
 public:
  ZoneIndex(std::vector<SemanticZone> zones, double sigma_m, double search_radius_m);

  // Normalized activity likelihood at l. With no zone inside the search
  // radius the result is uniform and *flagged is set; a neighborhood whose
  // kernel weights all underflow to zero also falls back to uniform.
  ProbVector spatial_likelihood(LatLon l, bool* flagged = nullptr) const;

  // Linear-scan reference with the same contract; for verification.
  ProbVector spatial_likelihood_linear(LatLon l, bool* flagged = nullptr) const;

  const std::vector<SemanticZone>& zones() const { return zones_; }
  double sigma_m() const { return sigma_m_; }
  double search_radius_m() const { return search_radius_m_; }

 private:
  template <typename ZoneVisitor>
  ProbVector accumulate(LatLon l, bool* flagged, ZoneVisitor&& visit) const;

  std::vector<SemanticZone> zones_;
  std::vector<LatLon> centroids_;
  double sigma_m_;
  double search_radius_m_;
  GeoGrid grid_;
};

}  // namespace tripurpose
