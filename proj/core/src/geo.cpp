#include "tripurpose/geo.hpp"

#include <cmath>

namespace tripurpose {

double haversine_m(const LatLon& a, const LatLon& b) {
  constexpr double deg = kPi / 180.0;
  double phi1 = a.lat * deg;
  double phi2 = b.lat * deg;
  double dphi = (b.lat - a.lat) * deg;
  double dlam = (b.lon - a.lon) * deg;
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlam / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  if (h > 1.0) h = 1.0;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double meters_per_deg_lon(double lat_deg) {
  return kMetersPerDegLat * std::cos(lat_deg * kPi / 180.0);
}

LatLon offset_by_meters(const LatLon& p, double east_m, double north_m) {
  double lat = p.lat + north_m / kMetersPerDegLat;
  double lon = p.lon + east_m / meters_per_deg_lon(p.lat);
  return {lat, lon};
}

}  // namespace tripurpose
