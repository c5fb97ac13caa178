#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tripurpose/enrichment.hpp"
#include "tripurpose/error.hpp"
#include "tripurpose/ingest.hpp"

using namespace tripurpose;
using tptest::TempDir;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error to be thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("pings round-trip through write and load") {
  TempDir dir;
  PingCorpus corpus(2);
  corpus[0].agent_id = "A1";
  corpus[0].pings = {{1000, {34.05, -118.25}}, {1300, {34.0501, -118.2501}}};
  corpus[1].agent_id = "B2";
  corpus[1].pings = {{500, {34.06, -118.26}}};

  std::string path = dir.file("pings.csv");
  write_pings(path, corpus);
  LoadStats stats;
  PingCorpus loaded = load_pings(path, &stats);

  CHECK(stats.rows == 3);
  CHECK(stats.skipped == 0);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].agent_id == "A1");
  REQUIRE(loaded[0].pings.size() == 2);
  CHECK(loaded[0].pings[0].timestamp == 1000);
  CHECK(loaded[0].pings[1].location.lat == doctest::Approx(34.0501).epsilon(1e-12));
  CHECK(loaded[1].agent_id == "B2");
}

TEST_CASE("out-of-order ping rows are sorted per agent") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  write_text(path,
             "agent_id,timestamp_utc,lat,lon\n"
             "A,100,34.0,-118.0\n"
             "A,50,34.1,-118.1\n"
             "B,10,34.2,-118.2\n");
  PingCorpus loaded = load_pings(path);
  REQUIRE(loaded.size() == 2);
  REQUIRE(loaded[0].pings.size() == 2);
  CHECK(loaded[0].pings[0].timestamp == 50);
  CHECK(loaded[0].pings[1].timestamp == 100);
}

TEST_CASE("rows with invalid coordinates are skipped") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  write_text(path,
             "agent_id,timestamp_utc,lat,lon\n"
             "A,100,95.0,-118.0\n"
             "A,200,34.0,-118.0\n"
             "A,300,34.0,-118.0\n"
             "A,400,34.0,-118.0\n"
             "A,500,34.0,-118.0\n"
             "A,600,34.0,-118.0\n"
             "A,700,34.0,-118.0\n"
             "A,800,34.0,-118.0\n"
             "A,900,34.0,-118.0\n"
             "A,1000,34.0,-118.0\n");
  LoadStats stats;
  PingCorpus loaded = load_pings(path, &stats);
  CHECK(stats.rows == 10);
  CHECK(stats.skipped == 1);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].pings.size() == 9);
}

TEST_CASE("duplicate agent-timestamp pairs are dropped") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  write_text(path,
             "agent_id,timestamp_utc,lat,lon\n"
             "A,100,34.0,-118.0\n"
             "A,100,34.5,-118.5\n"
             "A,200,34.0,-118.0\n"
             "A,300,34.0,-118.0\n"
             "A,400,34.0,-118.0\n"
             "A,500,34.0,-118.0\n"
             "A,600,34.0,-118.0\n"
             "A,700,34.0,-118.0\n"
             "A,800,34.0,-118.0\n"
             "A,900,34.0,-118.0\n"
             "A,1000,34.0,-118.0\n");
  LoadStats stats;
  PingCorpus loaded = load_pings(path, &stats);
  CHECK(stats.skipped == 1);
  REQUIRE(loaded.size() == 1);
  REQUIRE(loaded[0].pings.size() == 10);
  CHECK(loaded[0].pings[0].timestamp == 100);
  CHECK(loaded[0].pings[1].timestamp == 200);
}

TEST_CASE("more than ten percent malformed rows aborts the load") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  std::string text = "agent_id,timestamp_utc,lat,lon\n";
  for (int i = 0; i < 8; ++i) text += "A," + std::to_string(100 + i) + ",34.0,-118.0\n";
  text += "garbage row one\n";
  text += "garbage row two\n";
  write_text(path, text);
  CHECK(kind_of([&] { (void)load_pings(path); }) == ErrorKind::CorruptInput);
}

TEST_CASE("exactly ten percent malformed rows still loads") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  std::string text = "agent_id,timestamp_utc,lat,lon\n";
  for (int i = 0; i < 9; ++i) text += "A," + std::to_string(100 + i) + ",34.0,-118.0\n";
  text += "garbage row\n";
  write_text(path, text);
  LoadStats stats;
  PingCorpus loaded = load_pings(path, &stats);
  CHECK(stats.rows == 10);
  CHECK(stats.skipped == 1);
  CHECK(loaded.size() == 1);
}

TEST_CASE("header-only ping file yields an empty corpus") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  write_text(path, "agent_id,timestamp_utc,lat,lon\n");
  LoadStats stats;
  PingCorpus loaded = load_pings(path, &stats);
  CHECK(loaded.empty());
  CHECK(stats.rows == 0);
}

TEST_CASE("missing or unexpected ping header is a schema error") {
  TempDir dir;
  std::string empty = dir.file("empty.csv");
  write_text(empty, "");
  CHECK(kind_of([&] { (void)load_pings(empty); }) == ErrorKind::Schema);

  std::string wrong = dir.file("wrong.csv");
  write_text(wrong, "time,latitude,longitude\n");
  CHECK(kind_of([&] { (void)load_pings(wrong); }) == ErrorKind::Schema);
}

TEST_CASE("long-form poi rows carry their distribution verbatim") {
  TempDir dir;
  std::string path = dir.file("pois.csv");
  std::string header = "poi_id,lat,lon,category";
  for (int i = 1; i <= 15; ++i) header += ",p" + std::to_string(i);
  write_text(path, header +
                       "\n"
                       "P1,34.0,-118.0,office,0,0.85,0,0,0,0,0,0,0,0,0.15,0,0,0,0\n");
  LoadStats stats;
  std::vector<Poi> pois = load_pois(path, &stats);
  REQUIRE(pois.size() == 1);
  CHECK(pois[0].poi_id == "P1");
  CHECK(pois[0].category == "office");
  CHECK(pois[0].activity_dist.at(Activity::Work) == doctest::Approx(0.85));
  CHECK(pois[0].activity_dist.at(Activity::Social) == doctest::Approx(0.15));
  CHECK(stats.unmapped == 0);
}

TEST_CASE("short-form poi rows resolve their category affinity") {
  TempDir dir;
  std::string path = dir.file("pois.csv");
  write_text(path,
             "poi_id,lat,lon,category\n"
             "P1,34.0,-118.0,cafe\n"
             "P2,34.1,-118.1,apartments\n");
  std::vector<Poi> pois = load_pois(path);
  REQUIRE(pois.size() == 2);
  const ProbVector* cafe = category_affinity("cafe");
  REQUIRE(cafe != nullptr);
  for (std::size_t i = 0; i < kActivityCount; ++i) {
    CHECK(pois[0].activity_dist[i] == doctest::Approx((*cafe)[i]).epsilon(1e-12));
  }
  CHECK(pois[1].activity_dist.at(Activity::Home) == doctest::Approx(0.9));
}

TEST_CASE("unknown poi categories are skipped and counted") {
  TempDir dir;
  std::string path = dir.file("pois.csv");
  write_text(path,
             "poi_id,lat,lon,category\n"
             "P1,34.0,-118.0,volcano_lair\n"
             "P2,34.1,-118.1,cafe\n"
             "P3,34.2,-118.2,cafe\n"
             "P4,34.3,-118.3,cafe\n"
             "P5,34.4,-118.4,cafe\n"
             "P6,34.5,-118.5,cafe\n"
             "P7,34.6,-118.6,cafe\n"
             "P8,34.7,-118.7,cafe\n"
             "P9,34.8,-118.8,cafe\n"
             "P10,34.9,-118.9,cafe\n");
  LoadStats stats;
  std::vector<Poi> pois = load_pois(path, &stats);
  CHECK(pois.size() == 9);
  CHECK(stats.unmapped == 1);
  CHECK(stats.skipped == 1);
}

TEST_CASE("poi round-trip preserves distributions") {
  TempDir dir;
  std::vector<Poi> pois;
  Poi p;
  p.poi_id = "X1";
  p.location = {34.0521, -118.2434};
  p.category = "cafe";
  p.activity_dist = *category_affinity("cafe");
  pois.push_back(p);
  std::string path = dir.file("pois.csv");
  write_pois(path, pois);
  std::vector<Poi> loaded = load_pois(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].poi_id == "X1");
  CHECK(loaded[0].location.lat == doctest::Approx(34.0521).epsilon(1e-12));
  for (std::size_t i = 0; i < kActivityCount; ++i) {
    CHECK(loaded[0].activity_dist[i] == doctest::Approx(pois[0].activity_dist[i]).epsilon(1e-12));
  }
}

TEST_CASE("reference statistics round-trip") {
  TempDir dir;
  ReferenceStats ref = default_reference_stats();
  std::string path = dir.file("reference.stats");
  write_reference(path, ref);
  ReferenceStats loaded = load_reference(path);

  CHECK(loaded.timezone_offset_min == ref.timezone_offset_min);
  for (std::size_t a = 0; a < kActivityCount; ++a) {
    CHECK(loaded.activity_shares[a] == doctest::Approx(ref.activity_shares[a]).epsilon(1e-9));
    for (int s = 0; s < kSlotsPerDay; ++s) {
      CHECK(loaded.start_time_prior[a][s] ==
            doctest::Approx(ref.start_time_prior[a][s]).epsilon(1e-9));
    }
    for (int b = 0; b < kDurationBins; ++b) {
      CHECK(loaded.duration_prior[a][b] ==
            doctest::Approx(ref.duration_prior[a][b]).epsilon(1e-9));
    }
    CHECK(loaded.start_absent[a] == ref.start_absent[a]);
    CHECK(loaded.duration_absent[a] == ref.duration_absent[a]);
  }
}

TEST_CASE("an all-zero start row marks the prior as absent") {
  TempDir dir;
  ReferenceStats ref = tptest::uniform_reference();
  ref.start_time_prior[index_of(Activity::Worship)].fill(0.0);
  std::string path = dir.file("reference.stats");
  write_reference(path, ref);
  ReferenceStats loaded = load_reference(path);
  CHECK(loaded.start_absent[index_of(Activity::Worship)]);
  CHECK_FALSE(loaded.start_absent[index_of(Activity::Home)]);
}

TEST_CASE("reference schema violations are rejected") {
  TempDir dir;

  std::string no_tz = dir.file("no_tz.stats");
  write_text(no_tz, "[SHARES]\n1 1.0\n");
  CHECK(kind_of([&] { (void)load_reference(no_tz); }) == ErrorKind::Schema);

  std::string bad_section = dir.file("bad_section.stats");
  write_text(bad_section, "[TZ_OFFSET_MIN]\n0\n[FOO]\n1 1\n");
  CHECK(kind_of([&] { (void)load_reference(bad_section); }) == ErrorKind::Schema);
}

TEST_CASE("staypoints round-trip labeled and unlabeled") {
  TempDir dir;
  StaypointCorpus corpus(1);
  corpus[0].agent_id = "A1";
  corpus[0].points.push_back(tptest::make_staypoint({34.0, -118.0}, 1000, 2000));
  corpus[0].points.push_back(
      tptest::make_staypoint({34.1, -118.1}, 3000, 4000, Activity::Work, 0.75));

  SUBCASE("unlabeled writer drops labels") {
    StaypointCorpus plain(1);
    plain[0].agent_id = "A1";
    plain[0].points.push_back(tptest::make_staypoint({34.0, -118.0}, 1000, 2000));
    std::string path = dir.file("staypoints.csv");
    write_staypoints(path, plain);
    StaypointCorpus loaded = load_staypoints(path);
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].points.size() == 1);
    CHECK_FALSE(loaded[0].points[0].labeled());
    CHECK(loaded[0].points[0].t_start == 1000);
    CHECK(loaded[0].points[0].duration_s() == 1000);
  }

  SUBCASE("labeled writer keeps label and confidence") {
    corpus[0].points[0].label = Activity::Home;
    corpus[0].points[0].confidence = 0.5;
    std::string path = dir.file("labeled.csv");
    write_staypoints(path, corpus);
    StaypointCorpus loaded = load_staypoints(path);
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].points.size() == 2);
    CHECK(loaded[0].points[1].label == Activity::Work);
    CHECK(loaded[0].points[1].confidence.value() == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("streaming reader matches the whole-file loader") {
  TempDir dir;
  PingCorpus corpus(3);
  for (std::size_t i = 0; i < 3; ++i) {
    corpus[i].agent_id = "A" + std::to_string(i);
    for (int k = 0; k < 5; ++k) {
      corpus[i].pings.push_back(
          {static_cast<Instant>(1000 + 60 * k), {34.0 + 0.01 * static_cast<double>(i), -118.0}});
    }
  }
  std::string path = dir.file("pings.csv");
  write_pings(path, corpus);

  PingCorpus whole = load_pings(path);
  PingStreamReader reader(path);
  AgentPings agent;
  std::size_t idx = 0;
  while (reader.next_agent(agent)) {
    REQUIRE(idx < whole.size());
    CHECK(agent.agent_id == whole[idx].agent_id);
    REQUIRE(agent.pings.size() == whole[idx].pings.size());
    for (std::size_t k = 0; k < agent.pings.size(); ++k) {
      CHECK(agent.pings[k].timestamp == whole[idx].pings[k].timestamp);
      CHECK(agent.pings[k].location.lat == doctest::Approx(whole[idx].pings[k].location.lat));
    }
    ++idx;
  }
  CHECK(idx == whole.size());
  CHECK(reader.stats().rows == 15);
}

TEST_CASE("streaming reader rejects a reappearing agent") {
  TempDir dir;
  std::string path = dir.file("pings.csv");
  write_text(path,
             "agent_id,timestamp_utc,lat,lon\n"
             "A,100,34.0,-118.0\n"
             "B,100,34.1,-118.1\n"
             "A,200,34.0,-118.0\n");
  PingStreamReader reader(path);
  AgentPings agent;
  CHECK(kind_of([&] {
          while (reader.next_agent(agent)) {
          }
        }) == ErrorKind::CorruptInput);
}
