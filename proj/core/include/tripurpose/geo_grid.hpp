#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "tripurpose/error.hpp"
#include "tripurpose/geo.hpp"

namespace tripurpose {

// Uniform lat/lon bucket grid for fixed-radius neighbor queries. Cell sizes
// are chosen so that any two points within radius_m of each other differ by
// at most one cell index per axis, which makes a 3x3 cell scan a complete
// candidate search; callers still filter by exact haversine distance.
class GeoGrid {
 public:
  GeoGrid(std::span<const LatLon> points, double radius_m) {
    if (!(radius_m > 0.0)) fail(ErrorKind::Config, "grid radius must be positive");
    if (points.empty()) {
      cell_lat_deg_ = cell_lon_deg_ = 1.0;
      return;
    }
    double max_abs_lat = 0.0;
    for (const auto& p : points) max_abs_lat = std::max(max_abs_lat, std::abs(p.lat));
    // Clamp so the per-degree longitude scale stays bounded away from zero.
    max_abs_lat = std::min(max_abs_lat, 85.0);
    cell_lat_deg_ = radius_m / kMetersPerDegLat;
    cell_lon_deg_ = radius_m / meters_per_deg_lon(max_abs_lat);
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key_of(points[i])].push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Invokes fn(point_index) for every point in the 3x3 cell neighborhood of q.
  template <typename Fn>
  void for_candidates(LatLon q, Fn&& fn) const {
    if (cells_.empty()) return;
    std::int64_t qx = axis_index(q.lat, cell_lat_deg_);
    std::int64_t qy = axis_index(q.lon, cell_lon_deg_);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(pack(qx + dx, qy + dy));
        if (it == cells_.end()) continue;
        for (std::uint32_t idx : it->second) fn(idx);
      }
    }
  }

 private:
  static std::int64_t axis_index(double value, double cell_deg) {
    return static_cast<std::int64_t>(std::floor(value / cell_deg));
  }

  static std::uint64_t pack(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffu);
  }

  std::uint64_t key_of(LatLon p) const {
    return pack(axis_index(p.lat, cell_lat_deg_), axis_index(p.lon, cell_lon_deg_));
  }

  double cell_lat_deg_ = 1.0;
  double cell_lon_deg_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace tripurpose
