#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tripurpose/extraction.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/metrics.hpp"
#include "tripurpose/synthetic.hpp"
#include "tripurpose/time_grid.hpp"

using namespace tripurpose;

namespace {

SynthConfig tiny_config(std::size_t agents, int days) {
  SynthConfig config;
  config.agents = agents;
  config.days = days;
  return config;
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
  SynthConfig config = tiny_config(40, 5);
  SyntheticCorpus a = generate_synthetic(config, 21);
  SyntheticCorpus b = generate_synthetic(config, 21);

  REQUIRE(a.pings.size() == b.pings.size());
  REQUIRE(a.pois.size() == b.pois.size());
  REQUIRE(a.truth.agents.size() == b.truth.agents.size());
  for (std::size_t ag = 0; ag < a.pings.size(); ++ag) {
    REQUIRE(a.pings[ag].pings.size() == b.pings[ag].pings.size());
    for (std::size_t i = 0; i < a.pings[ag].pings.size(); ++i) {
      CHECK(a.pings[ag].pings[i].timestamp == b.pings[ag].pings[i].timestamp);
      CHECK(a.pings[ag].pings[i].location.lat == b.pings[ag].pings[i].location.lat);
      CHECK(a.pings[ag].pings[i].location.lon == b.pings[ag].pings[i].location.lon);
    }
  }
  for (std::size_t p = 0; p < a.pois.size(); ++p) {
    CHECK(a.pois[p].poi_id == b.pois[p].poi_id);
    CHECK(a.pois[p].location.lat == b.pois[p].location.lat);
  }

  SyntheticCorpus c = generate_synthetic(config, 22);
  bool differs = a.pings.size() != c.pings.size();
  if (!differs && !a.pings.empty() && !a.pings[0].pings.empty() && !c.pings[0].pings.empty()) {
    differs = a.pings[0].pings[0].location.lat != c.pings[0].pings[0].location.lat;
  }
  CHECK(differs);
}

TEST_CASE("the worker count does not change the corpus") {
  SynthConfig config = tiny_config(30, 4);
  SyntheticCorpus one = generate_synthetic(config, 9, 1);
  SyntheticCorpus four = generate_synthetic(config, 9, 4);
  REQUIRE(one.pings.size() == four.pings.size());
  REQUIRE(one.pois.size() == four.pois.size());
  for (std::size_t ag = 0; ag < one.pings.size(); ++ag) {
    REQUIRE(one.pings[ag].pings.size() == four.pings[ag].pings.size());
    for (std::size_t i = 0; i < one.pings[ag].pings.size(); ++i) {
      CHECK(one.pings[ag].pings[i].timestamp == four.pings[ag].pings[i].timestamp);
      CHECK(one.pings[ag].pings[i].location.lat == four.pings[ag].pings[i].location.lat);
      CHECK(one.pings[ag].pings[i].location.lon == four.pings[ag].pings[i].location.lon);
    }
  }
  for (std::size_t ag = 0; ag < one.truth.agents.size(); ++ag) {
    REQUIRE(one.truth.agents[ag].visits.size() == four.truth.agents[ag].visits.size());
    for (std::size_t v = 0; v < one.truth.agents[ag].visits.size(); ++v) {
      CHECK(one.truth.agents[ag].visits[v].t_start == four.truth.agents[ag].visits[v].t_start);
      CHECK(one.truth.agents[ag].visits[v].activity == four.truth.agents[ag].visits[v].activity);
    }
  }
}

TEST_CASE("a homebound agent produces only home visits") {
  SynthConfig config = tiny_config(1, 7);
  config.p_work = 0.0;
  config.p_school = 0.0;
  config.nm_rate = 0.0;
  SyntheticCorpus corpus = generate_synthetic(config, 3);
  REQUIRE(corpus.truth.agents.size() == 1);
  CHECK_FALSE(corpus.truth.agents[0].second_type.has_value());
  CHECK(!corpus.truth.agents[0].visits.empty());
  for (const TruthVisit& v : corpus.truth.agents[0].visits) {
    CHECK(v.activity == Activity::Home);
  }
}

TEST_CASE("planted work visits follow the reference start-time prior") {
  SynthConfig config = tiny_config(1000, 14);
  SyntheticCorpus corpus = generate_synthetic(config, 17);

  SlotHistogram hist{};
  hist.fill(0.0);
  std::size_t n = 0;
  for (const AgentTruth& agent : corpus.truth.agents) {
    for (const TruthVisit& v : agent.visits) {
      if (v.activity != Activity::Work) continue;
      hist[static_cast<std::size_t>(slot_of(v.t_start, config.ref.timezone_offset_min))] += 1.0;
      ++n;
    }
  }
  REQUIRE(n >= 10000);
  std::vector<double> got(hist.begin(), hist.end());
  const SlotHistogram& prior = config.ref.start_prior(Activity::Work);
  std::vector<double> want(prior.begin(), prior.end());
  CHECK(jsd(got, want) <= 0.05);
}

TEST_CASE("sampled visit labels converge to the closed-form shares") {
  SynthConfig config = tiny_config(600, 14);
  SyntheticCorpus corpus = generate_synthetic(config, 29);
  std::array<double, kActivityCount> counts{};
  double total = 0.0;
  for (const AgentTruth& agent : corpus.truth.agents) {
    for (const TruthVisit& v : agent.visits) {
      counts[index_of(v.activity)] += 1.0;
      total += 1.0;
    }
  }
  REQUIRE(total > 0.0);
  std::array<double, kActivityCount> expected = expected_visit_shares(config);
  double sum = 0.0;
  for (double v : expected) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> got(counts.begin(), counts.end());
  std::vector<double> want(expected.begin(), expected.end());
  CHECK(jsd(got, want) <= 0.01);
}

TEST_CASE("truth visits round-trip through csv") {
  tptest::TempDir dir;
  SynthConfig config = tiny_config(12, 3);
  SyntheticCorpus corpus = generate_synthetic(config, 31);
  std::string path = dir.file("truth.csv");
  write_truth(path, corpus.truth);
  SyntheticGroundTruth loaded = load_truth(path);

  REQUIRE(loaded.agents.size() == corpus.truth.agents.size());
  for (std::size_t ag = 0; ag < loaded.agents.size(); ++ag) {
    CHECK(loaded.agents[ag].agent_id == corpus.truth.agents[ag].agent_id);
    REQUIRE(loaded.agents[ag].visits.size() == corpus.truth.agents[ag].visits.size());
    for (std::size_t v = 0; v < loaded.agents[ag].visits.size(); ++v) {
      const TruthVisit& got = loaded.agents[ag].visits[v];
      const TruthVisit& want = corpus.truth.agents[ag].visits[v];
      CHECK(got.t_start == want.t_start);
      CHECK(got.t_end == want.t_end);
      CHECK(got.activity == want.activity);
      CHECK(got.anchor.lat == doctest::Approx(want.anchor.lat).epsilon(1e-12));
      CHECK(got.anchor.lon == doctest::Approx(want.anchor.lon).epsilon(1e-12));
    }
  }
}

TEST_CASE("anchor export writes one row per agent with optional second anchor") {
  tptest::TempDir dir;
  SynthConfig config = tiny_config(25, 3);
  SyntheticCorpus corpus = generate_synthetic(config, 37);
  std::string path = dir.file("anchors.csv");
  write_anchors(path, corpus.truth);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "agent_id,home_lat,home_lon,second_code,second_lat,second_lon");
  std::size_t rows = 0;
  std::size_t with_second = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 6);
    const AgentTruth& agent = corpus.truth.agents[rows];
    CHECK(fields[0] == agent.agent_id);
    CHECK(std::stod(fields[1]) == doctest::Approx(agent.home.lat).epsilon(1e-12));
    int code = std::stoi(fields[3]);
    if (agent.second_type.has_value()) {
      CHECK(code == code_of(*agent.second_type));
      CHECK(std::stod(fields[4]) == doctest::Approx(agent.second.lat).epsilon(1e-12));
      ++with_second;
    } else {
      CHECK(code == 0);
    }
    ++rows;
  }
  CHECK(rows == corpus.truth.agents.size());
  CHECK(with_second > 0);
}

TEST_CASE("extracted staypoints reproduce the planted visit boundaries") {
  SynthConfig config = tiny_config(25, 7);
  SyntheticCorpus corpus = generate_synthetic(config, 41);
  StaypointCorpus staypoints = extract_corpus(corpus.pings, ExtractionParams{});

  std::size_t matched = 0;
  std::size_t total = 0;
  REQUIRE(staypoints.size() == corpus.truth.agents.size());
  for (std::size_t ag = 0; ag < staypoints.size(); ++ag) {
    std::map<std::pair<Instant, Instant>, bool> extracted;
    for (const Staypoint& s : staypoints[ag].points) {
      extracted[{s.t_start, s.t_end}] = true;
    }
    for (const TruthVisit& v : corpus.truth.agents[ag].visits) {
      ++total;
      if (extracted.count({v.t_start, v.t_end})) ++matched;
    }
  }
  REQUIRE(total > 100);
  CHECK(static_cast<double>(matched) / static_cast<double>(total) >= 0.99);
}

TEST_CASE("pois include residential clusters near every home") {
  SynthConfig config = tiny_config(20, 3);
  SyntheticCorpus corpus = generate_synthetic(config, 43);
  for (const AgentTruth& agent : corpus.truth.agents) {
    double nearest = 1e18;
    for (const Poi& poi : corpus.pois) {
      nearest = std::min(nearest, haversine_m(poi.location, agent.home));
    }
    CHECK(nearest <= 30.0);
  }
}

TEST_CASE("configuration validation rejects impossible setups") {
  SynthConfig zero_agents = tiny_config(0, 5);
  CHECK_THROWS(zero_agents.validate());

  SynthConfig bad_box = tiny_config(10, 5);
  bad_box.lat_min = 35.0;
  bad_box.lat_max = 34.0;
  CHECK_THROWS(bad_box.validate());

  SynthConfig bad_roles = tiny_config(10, 5);
  bad_roles.p_work = 0.8;
  bad_roles.p_school = 0.5;
  CHECK_THROWS(bad_roles.validate());
}
