#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "tripurpose/activity.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/ingest.hpp"
#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"

namespace tptest {

using namespace tripurpose;

// Shared anchor for geometry tests; mid-latitude so lon/lat scaling differs.
inline constexpr LatLon kBase{34.05, -118.25};

inline LatLon at_meters(double east_m, double north_m, LatLon base = kBase) {
  return offset_by_meters(base, east_m, north_m);
}

inline Staypoint make_staypoint(LatLon where, Instant t_start, Instant t_end,
                                std::optional<Activity> label = std::nullopt,
                                std::optional<double> confidence = std::nullopt) {
  Staypoint s;
  s.location = where;
  s.t_start = t_start;
  s.t_end = t_end;
  s.label = label;
  s.confidence = confidence;
  return s;
}

inline Poi make_poi(std::string id, LatLon where, Activity type, double weight = 1.0) {
  Poi poi;
  poi.poi_id = std::move(id);
  poi.location = where;
  poi.activity_dist = point_mass(type);
  poi.category = "";
  (void)weight;
  return poi;
}

// Reference statistics with no temporal or categorical structure: uniform
// shares and flat priors for every activity.  Useful when a test wants
// spatial evidence to be the only signal.
inline ReferenceStats uniform_reference(int timezone_offset_min = 0) {
  ReferenceStats ref;
  ref.timezone_offset_min = timezone_offset_min;
  for (std::size_t a = 0; a < kActivityCount; ++a) {
    ref.activity_shares[a] = 1.0 / static_cast<double>(kActivityCount);
    ref.start_time_prior[a].fill(1.0 / static_cast<double>(kSlotsPerDay));
    ref.duration_prior[a].fill(1.0 / static_cast<double>(kDurationBins));
    ref.start_absent[a] = false;
    ref.duration_absent[a] = false;
  }
  return ref;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng{std::random_device{}()};
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto candidate = base / ("tripurpose_test_" + std::to_string(rng()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create scratch directory");
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace tptest
