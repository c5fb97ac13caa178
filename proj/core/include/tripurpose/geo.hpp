#pragma once

namespace tripurpose {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMetersPerDegLat = kPi * kEarthRadiusM / 180.0;

struct LatLon {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool operator==(const LatLon&) const = default;
};

inline bool valid_coordinates(const LatLon& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

// Great-circle distance in meters on a spherical Earth.
double haversine_m(const LatLon& a, const LatLon& b);

double meters_per_deg_lon(double lat_deg);

// Displaces p by east/north meters in the local tangent frame.
LatLon offset_by_meters(const LatLon& p, double east_m, double north_m);

}  // namespace tripurpose
