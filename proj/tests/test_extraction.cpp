#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tripurpose/extraction.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/rng.hpp"

using namespace tripurpose;
using tptest::at_meters;
using tptest::kBase;

namespace {

std::vector<RawPing> dwell(LatLon where, Instant t0, Instant t1, Instant step) {
  std::vector<RawPing> pings;
  for (Instant t = t0; t <= t1; t += step) pings.push_back({t, where});
  return pings;
}

void append(std::vector<RawPing>& dst, const std::vector<RawPing>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// Independent re-statement of the segmentation rule: grow an episode while
// the next ping lies within d_max of the mean of the members collected so
// far (mean recomputed from scratch every step) and arrives within gap_max
// of the previous ping; keep episodes spanning at least t_min.
std::vector<Staypoint> reference_segmentation(const std::vector<RawPing>& pings,
                                              const ExtractionParams& params) {
  std::vector<Staypoint> out;
  std::vector<RawPing> members;
  auto centroid = [&] {
    double lat = 0.0, lon = 0.0;
    for (const RawPing& p : members) {
      lat += p.location.lat;
      lon += p.location.lon;
    }
    double n = static_cast<double>(members.size());
    return LatLon{lat / n, lon / n};
  };
  auto close = [&] {
    if (members.empty()) return;
    double span = static_cast<double>(members.back().timestamp - members.front().timestamp);
    if (span >= params.t_min_s) {
      Staypoint s;
      s.location = centroid();
      s.t_start = members.front().timestamp;
      s.t_end = members.back().timestamp;
      out.push_back(s);
    }
    members.clear();
  };
  for (const RawPing& p : pings) {
    if (!members.empty()) {
      bool gap = static_cast<double>(p.timestamp - members.back().timestamp) > params.gap_max_s;
      bool far = haversine_m(p.location, centroid()) > params.d_max_m;
      if (gap || far) close();
    }
    members.push_back(p);
  }
  close();
  return out;
}

}  // namespace

TEST_CASE("coincident pings over twenty minutes form one staypoint") {
  ExtractionParams params;
  params.t_min_s = 600.0;
  std::vector<RawPing> pings;
  for (int i = 0; i < 10; ++i) {
    pings.push_back({static_cast<Instant>(1000 + i * 133), kBase});
  }
  std::vector<Staypoint> points = extract_staypoints(pings, params);
  REQUIRE(points.size() == 1);
  CHECK(points[0].t_start == 1000);
  CHECK(points[0].t_end == 1000 + 9 * 133);
  CHECK(points[0].duration_s() == 9 * 133);
  CHECK(haversine_m(points[0].location, kBase) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("a moving trajectory yields no staypoints") {
  ExtractionParams params;
  params.d_max_m = 100.0;
  params.t_min_s = 300.0;
  std::vector<RawPing> pings;
  for (int i = 0; i < 30; ++i) {
    // 1 km per minute straight east: every ping leaves the running centroid.
    pings.push_back({static_cast<Instant>(i * 60), at_meters(1000.0 * i, 0.0)});
  }
  CHECK(extract_staypoints(pings, params).empty());
}

TEST_CASE("two separate dwells yield exactly two staypoints") {
  ExtractionParams params;
  params.t_min_s = 600.0;
  std::vector<RawPing> pings = dwell(kBase, 0, 900, 60);
  append(pings, dwell(at_meters(5000.0, 0.0), 1200, 2100, 60));
  std::vector<Staypoint> points = extract_staypoints(pings, params);
  REQUIRE(points.size() == 2);
  CHECK(haversine_m(points[0].location, kBase) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(haversine_m(points[1].location, at_meters(5000.0, 0.0)) ==
        doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("a long silence splits a dwell at the same spot") {
  ExtractionParams params;
  params.t_min_s = 300.0;
  params.gap_max_s = 3600.0;
  std::vector<RawPing> pings = dwell(kBase, 0, 600, 60);
  append(pings, dwell(kBase, 600 + 7200, 600 + 7800, 60));
  std::vector<Staypoint> points = extract_staypoints(pings, params);
  REQUIRE(points.size() == 2);
  CHECK(points[0].t_end == 600);
  CHECK(points[1].t_start == 7800);
}

TEST_CASE("an episode shorter than the dwell floor is discarded") {
  ExtractionParams params;
  params.t_min_s = 300.0;
  std::vector<RawPing> pings = dwell(kBase, 0, 240, 60);
  CHECK(extract_staypoints(pings, params).empty());
}

TEST_CASE("segmentation matches an independent restatement on random walks") {
  ExtractionParams params;  // defaults: 200 m / 300 s / 3600 s
  Rng rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RawPing> pings;
    Instant t = 0;
    double east = 0.0, north = 0.0;
    for (int i = 0; i < 400; ++i) {
      t += rng.uniform_int(30, 600);
      // Mix of small jitter and occasional jumps so episodes open and close.
      if (rng.uniform01() < 0.07) {
        east += rng.uniform(-2000.0, 2000.0);
        north += rng.uniform(-2000.0, 2000.0);
      } else {
        east += rng.uniform(-40.0, 40.0);
        north += rng.uniform(-40.0, 40.0);
      }
      pings.push_back({t, at_meters(east, north)});
    }
    std::vector<Staypoint> got = extract_staypoints(pings, params);
    std::vector<Staypoint> want = reference_segmentation(pings, params);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].t_start == want[i].t_start);
      CHECK(got[i].t_end == want[i].t_end);
      CHECK(got[i].location.lat == doctest::Approx(want[i].location.lat).epsilon(1e-12));
      CHECK(got[i].location.lon == doctest::Approx(want[i].location.lon).epsilon(1e-12));
    }
  }
}

TEST_CASE("extraction is deterministic and corpus-wide extraction matches per-agent") {
  ExtractionParams params;
  PingCorpus corpus(2);
  corpus[0].agent_id = "A";
  corpus[0].pings = dwell(kBase, 0, 1200, 60);
  corpus[1].agent_id = "B";
  corpus[1].pings = dwell(at_meters(3000.0, 0.0), 0, 1800, 120);

  StaypointCorpus first = extract_corpus(corpus, params);
  StaypointCorpus second = extract_corpus(corpus, params);
  REQUIRE(first.size() == 2);
  REQUIRE(second.size() == 2);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].agent_id == corpus[i].agent_id);
    REQUIRE(first[i].points.size() == second[i].points.size());
    std::vector<Staypoint> direct = extract_staypoints(corpus[i].pings, params);
    REQUIRE(first[i].points.size() == direct.size());
    for (std::size_t k = 0; k < direct.size(); ++k) {
      CHECK(first[i].points[k].t_start == direct[k].t_start);
      CHECK(first[i].points[k].t_end == direct[k].t_end);
      CHECK(first[i].points[k].location.lat == second[i].points[k].location.lat);
      CHECK(first[i].points[k].location.lon == second[i].points[k].location.lon);
    }
  }
}

TEST_CASE("a place revisited on three days becomes a candidate") {
  std::vector<Staypoint> points;
  for (int d = 0; d < 3; ++d) {
    Instant t0 = d * kSecondsPerDay + 10 * 3600;
    points.push_back(tptest::make_staypoint(kBase, t0, t0 + 3600));
  }
  std::vector<CandidateLocation> locs = cluster_agent_staypoints(points, 100.0, 1, 0);
  REQUIRE(locs.size() == 1);
  CHECK(locs[0].candidate);
  CHECK(locs[0].visit_days.size() == 3);
  CHECK(std::is_sorted(locs[0].visit_days.begin(), locs[0].visit_days.end()));
}

TEST_CASE("a place seen on one day is not a candidate") {
  std::vector<Staypoint> points;
  points.push_back(tptest::make_staypoint(kBase, 1000, 5000));
  points.push_back(tptest::make_staypoint(kBase, 20000, 30000));
  std::vector<CandidateLocation> locs = cluster_agent_staypoints(points, 100.0, 1, 0);
  REQUIRE(locs.size() == 1);
  CHECK_FALSE(locs[0].candidate);
  CHECK(locs[0].visit_days.size() == 1);
}

TEST_CASE("distant places form separate clusters") {
  std::vector<Staypoint> points;
  points.push_back(tptest::make_staypoint(kBase, 0, 3600));
  points.push_back(tptest::make_staypoint(at_meters(10000.0, 0.0), 7200, 10800));
  std::vector<CandidateLocation> locs = cluster_agent_staypoints(points, 100.0, 1, 0);
  REQUIRE(locs.size() == 2);
  CHECK(locs[0].location_id != locs[1].location_id);
}

TEST_CASE("cluster centroids are duration-weighted") {
  std::vector<Staypoint> points;
  // One hour at the base, three hours 50 m east: centroid 3/4 of the way.
  points.push_back(tptest::make_staypoint(kBase, 0, 3600));
  points.push_back(tptest::make_staypoint(at_meters(50.0, 0.0), 7200, 7200 + 3 * 3600));
  std::vector<CandidateLocation> locs = cluster_agent_staypoints(points, 100.0, 1, 0);
  REQUIRE(locs.size() == 1);
  double east = haversine_m(kBase, {kBase.lat, locs[0].centroid.lon});
  CHECK(east == doctest::Approx(37.5).epsilon(0.01));
  CHECK(locs[0].centroid.lat == doctest::Approx(kBase.lat).epsilon(1e-12));
  CHECK(locs[0].radius_m == doctest::Approx(37.5).epsilon(0.02));
}

TEST_CASE("members partition the staypoints") {
  Rng rng(55);
  std::vector<Staypoint> points;
  Instant t = 0;
  for (int i = 0; i < 60; ++i) {
    t += rng.uniform_int(1800, 7200);
    double east = rng.uniform(0.0, 2000.0);
    double north = rng.uniform(0.0, 2000.0);
    points.push_back(tptest::make_staypoint(at_meters(east, north), t, t + 1800));
    t += 1800;
  }
  std::vector<CandidateLocation> locs = cluster_agent_staypoints(points, 100.0, 1, 0);
  std::set<std::size_t> seen;
  for (const CandidateLocation& loc : locs) {
    for (std::size_t m : loc.members) {
      CHECK(m < points.size());
      CHECK(seen.insert(m).second);
    }
  }
  CHECK(seen.size() == points.size());
}

TEST_CASE("clustering already-snapped staypoints is a fixed point") {
  // Well-separated places (400 m grid, 40 m jitter) so snapping members to
  // their centroid cannot bridge neighboring clusters.
  Rng rng(77);
  std::vector<Staypoint> points;
  Instant t = 0;
  for (int i = 0; i < 40; ++i) {
    t += rng.uniform_int(1800, 7200);
    double east = 400.0 * static_cast<double>(i % 5) + rng.uniform(-40.0, 40.0);
    double north = 400.0 * static_cast<double>(i / 10) + rng.uniform(-40.0, 40.0);
    points.push_back(tptest::make_staypoint(at_meters(east, north), t, t + 2400));
    t += 2400;
  }
  std::vector<CandidateLocation> first = cluster_agent_staypoints(points, 100.0, 1, 0);

  std::vector<Staypoint> snapped = points;
  for (const CandidateLocation& loc : first) {
    for (std::size_t m : loc.members) snapped[m].location = loc.centroid;
  }
  std::vector<CandidateLocation> second = cluster_agent_staypoints(snapped, 100.0, 1, 0);
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].members == first[i].members);
    CHECK(second[i].centroid.lat == doctest::Approx(first[i].centroid.lat).epsilon(1e-12));
    CHECK(second[i].centroid.lon == doctest::Approx(first[i].centroid.lon).epsilon(1e-12));
    CHECK(second[i].candidate == first[i].candidate);
  }
}
