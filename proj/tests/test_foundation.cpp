#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tripurpose/activity.hpp"
#include "tripurpose/error.hpp"
#include "tripurpose/geo.hpp"
#include "tripurpose/prob_vector.hpp"
#include "tripurpose/rng.hpp"
#include "tripurpose/time_grid.hpp"

using namespace tripurpose;
using tptest::kBase;

namespace {

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

TEST_CASE("one degree of latitude along a meridian") {
  double d = haversine_m({0.0, 0.0}, {1.0, 0.0});
  CHECK(d == doctest::Approx(kMetersPerDegLat).epsilon(1e-9));
}

TEST_CASE("haversine is symmetric and zero on identical points") {
  LatLon a{34.05, -118.25};
  LatLon b{34.10, -118.20};
  CHECK(haversine_m(a, a) == doctest::Approx(0.0));
  CHECK(haversine_m(a, b) == doctest::Approx(haversine_m(b, a)));
}

TEST_CASE("meters per degree of longitude shrinks with latitude") {
  CHECK(meters_per_deg_lon(0.0) == doctest::Approx(kMetersPerDegLat).epsilon(1e-9));
  CHECK(meters_per_deg_lon(60.0) == doctest::Approx(0.5 * kMetersPerDegLat).epsilon(1e-9));
}

TEST_CASE("offset_by_meters matches the requested displacement") {
  LatLon moved = offset_by_meters(kBase, 500.0, -300.0);
  double d = haversine_m(kBase, moved);
  CHECK(d == doctest::Approx(std::sqrt(500.0 * 500.0 + 300.0 * 300.0)).epsilon(1e-4));

  LatLon back = offset_by_meters(moved, -500.0, 300.0);
  CHECK(back.lat == doctest::Approx(kBase.lat).epsilon(1e-12));
  CHECK(back.lon == doctest::Approx(kBase.lon).epsilon(1e-9));
}

TEST_CASE("coordinate validation bounds") {
  CHECK(valid_coordinates({90.0, 180.0}));
  CHECK(valid_coordinates({-90.0, -180.0}));
  CHECK_FALSE(valid_coordinates({90.0001, 0.0}));
  CHECK_FALSE(valid_coordinates({0.0, 180.5}));
  CHECK_FALSE(valid_coordinates({std::nan(""), 0.0}));
  CHECK_FALSE(valid_coordinates({0.0, std::nan("")}));
}

TEST_CASE("floor division and modulo handle negatives") {
  CHECK(floor_div(-1, 86400) == -1);
  CHECK(floor_mod(-1, 86400) == 86399);
  CHECK(floor_div(86400, 86400) == 1);
  CHECK(floor_mod(86400, 86400) == 0);
}

TEST_CASE("slot_of maps epoch seconds to 15-minute slots") {
  CHECK(slot_of(0, 0) == 0);
  CHECK(slot_of(899, 0) == 0);
  CHECK(slot_of(900, 0) == 1);
  CHECK(slot_of(86399, 0) == 95);
  CHECK(slot_of(86400, 0) == 0);
  // UTC-8: midnight UTC is 16:00 the previous local day, slot 64.
  CHECK(slot_of(0, -480) == 64);
}

TEST_CASE("duration_bin clamps at 24 hours") {
  CHECK(duration_bin(0) == 0);
  CHECK(duration_bin(899) == 0);
  CHECK(duration_bin(900) == 1);
  CHECK(duration_bin(9 * 900 - 1) == 8);
  CHECK(duration_bin(86399) == 95);
  CHECK(duration_bin(2 * 86400) == 95);
}

TEST_CASE("weekday bookkeeping") {
  // Day 0 (1970-01-01) was a Thursday; 19723 lands on a Monday.
  CHECK(weekday_of(0) == 3);
  CHECK(weekday_of(19723) == 0);
  CHECK_FALSE(is_weekend_day(19723));
  CHECK(is_weekend_day(19728));
  CHECK(is_weekend_day(19729));
  CHECK_FALSE(is_weekend_day(19730));
}

TEST_CASE("for_each_slot_overlap reports fractional coverage") {
  std::vector<std::int64_t> days;
  std::vector<int> slots;
  std::vector<double> fracs;
  for_each_slot_overlap(450, 1350, 0, [&](std::int64_t day, int slot, double frac) {
    days.push_back(day);
    slots.push_back(slot);
    fracs.push_back(frac);
  });
  REQUIRE(slots.size() == 2);
  CHECK(days[0] == 0);
  CHECK(slots[0] == 0);
  CHECK(fracs[0] == doctest::Approx(0.5));
  CHECK(slots[1] == 1);
  CHECK(fracs[1] == doctest::Approx(0.5));
}

TEST_CASE("for_each_slot_overlap crosses midnight") {
  std::vector<std::int64_t> days;
  std::vector<int> slots;
  double total = 0.0;
  for_each_slot_overlap(86300, 86500, 0, [&](std::int64_t day, int slot, double frac) {
    days.push_back(day);
    slots.push_back(slot);
    total += frac * kSlotSeconds;
  });
  REQUIRE(slots.size() == 2);
  CHECK(days[0] == 0);
  CHECK(slots[0] == 95);
  CHECK(days[1] == 1);
  CHECK(slots[1] == 0);
  CHECK(total == doctest::Approx(200.0));
}

TEST_CASE("for_each_slot_overlap integrates to the interval length") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Instant t0 = rng.uniform_int(0, 5 * 86400);
    Instant t1 = t0 + rng.uniform_int(1, 90000);
    double total = 0.0;
    for_each_slot_overlap(t0, t1, -480,
                          [&](std::int64_t, int, double frac) { total += frac * kSlotSeconds; });
    CHECK(total == doctest::Approx(static_cast<double>(t1 - t0)).epsilon(1e-9));
  }
}

TEST_CASE("normalize rescales to a unit sum") {
  ProbVector v;
  for (std::size_t i = 0; i < kActivityCount; ++i) v[i] = (i < 4) ? 1.0 : 0.0;
  ProbVector n = normalize(v);
  CHECK(n.is_normalized());
  CHECK(n[0] == doctest::Approx(0.25));
  CHECK(n[4] == doctest::Approx(0.0));
}

TEST_CASE("normalize rejects degenerate input") {
  ProbVector zero;
  CHECK(kind_of([&] { (void)normalize(zero); }) == ErrorKind::DegenerateDistribution);
  ProbVector bad;
  bad[2] = std::nan("");
  CHECK(kind_of([&] { (void)normalize(bad); }) == ErrorKind::DegenerateDistribution);
}

TEST_CASE("uniform and point-mass vectors") {
  ProbVector u = uniform_prob_vector();
  CHECK(u.is_normalized());
  CHECK(u[0] == doctest::Approx(1.0 / 15.0));

  ProbVector p = point_mass(Activity::Work);
  CHECK(p.is_normalized());
  CHECK(p.at(Activity::Work) == doctest::Approx(1.0));
  CHECK(p.at(Activity::Home) == doctest::Approx(0.0));
  CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("activity codes round-trip") {
  CHECK(code_of(Activity::Home) == 1);
  CHECK(code_of(Activity::Work) == 2);
  CHECK(code_of(Activity::School) == 3);
  CHECK(code_of(Activity::PickupDrop) == 15);
  for (Activity a : all_activities()) {
    CHECK(activity_from_code(code_of(a)) == a);
    CHECK(is_valid_code(code_of(a)));
  }
  CHECK_FALSE(is_valid_code(0));
  CHECK_FALSE(is_valid_code(16));
  CHECK(kind_of([] { (void)activity_from_code(16); }) == ErrorKind::Schema);
}

TEST_CASE("activity classes split 3 / 12") {
  CHECK(mandatory_activities().size() == kMandatoryCount);
  CHECK(nonmandatory_activities().size() == kNonMandatoryCount);
  CHECK(all_activities().size() == kActivityCount);
  CHECK(class_of(Activity::Home) == ActivityClass::Mandatory);
  CHECK(class_of(Activity::Work) == ActivityClass::Mandatory);
  CHECK(class_of(Activity::School) == ActivityClass::Mandatory);
  for (Activity a : nonmandatory_activities()) {
    CHECK(class_of(a) == ActivityClass::NonMandatory);
  }
  CHECK(std::string(activity_name(Activity::Work)) == "Work");
  CHECK(std::string(activity_name(Activity::PickupDrop)) == "PickupDrop");
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s1 = Rng::stream(42, 1);
  Rng s2 = Rng::stream(42, 2);
  bool differs = false;
  for (int i = 0; i < 16; ++i) differs |= (s1.next_u64() != s2.next_u64());
  CHECK(differs);
}

TEST_CASE("rng distributions stay in range") {
  Rng rng(9);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    int k = rng.uniform_int(3, 5);
    CHECK(k >= 3);
    CHECK(k <= 5);
    seen.insert(k);
    double v = rng.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v <= 3.0);
  }
  CHECK(seen.size() == 3);

  double mean = 0.0;
  for (int i = 0; i < 10000; ++i) mean += rng.normal();
  mean /= 10000.0;
  CHECK(std::abs(mean) < 0.05);

  std::vector<double> weights{0.0, 1.0, 0.0};
  for (int i = 0; i < 50; ++i) CHECK(rng.categorical(weights) == 1);
}
