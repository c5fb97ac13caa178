#include "tripurpose/mandatory.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tripurpose/error.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {

std::size_t MandatoryCaps::mandatory_index(Activity a) {
  switch (a) {
    case Activity::Home: return 0;
    case Activity::Work: return 1;
    case Activity::School: return 2;
    default: fail(ErrorKind::Config, "not a mandatory activity: " + std::string(activity_name(a)));
  }
}

std::array<double, kMandatoryCount> time_evidence(std::span<const Staypoint> agent_staypoints,
                                                  std::span<const std::size_t> members,
                                                  const ReferenceStats& ref,
                                                  const MandatoryCaps& caps) {
  // Raw per-day integrals of the reference time-of-day profile.
  std::map<Instant, std::array<double, kMandatoryCount>> daily;
  for (std::size_t idx : members) {
    const Staypoint& sp = agent_staypoints[idx];
    for_each_slot_overlap(sp.t_start, sp.t_end, ref.timezone_offset_min,
                          [&](Instant day, std::size_t slot, double fraction) {
                            auto& acc = daily[day];
                            for (std::size_t m = 0; m < kMandatoryCount; ++m) {
                              Activity a = mandatory_activities()[m];
                              acc[m] += ref.start_prior(a)[slot] * fraction;
                            }
                          });
  }

  std::array<double, kMandatoryCount> total{};
  for (const auto& [day, raw] : daily) {
    bool weekend = is_weekend_day(day);
    for (std::size_t m = 0; m < kMandatoryCount; ++m) {
      Activity a = mandatory_activities()[m];
      if (weekend && (a == Activity::Work || a == Activity::School)) continue;
      total[m] += std::min(raw[m], caps.tau[m]);
    }
  }
  return total;
}

BidTable compute_bids(std::span<const CandidateLocation> locations,
                      std::span<const Staypoint> agent_staypoints, const ReferenceStats& ref,
                      const ZoneIndex& zones, const MandatoryCaps& caps) {
  BidTable table;
  table.rows.resize(locations.size());
  for (std::size_t i = 0; i < locations.size(); ++i) {
    const CandidateLocation& loc = locations[i];
    if (!loc.candidate) continue;  // row stays zero, never wins
    BidRow& row = table.rows[i];
    row.p_time = time_evidence(agent_staypoints, loc.members, ref, caps);
    row.w_stab = std::log2(1.0 + static_cast<double>(loc.visit_days.size()));
    bool flagged = false;
    ProbVector space = zones.spatial_likelihood(loc.centroid, &flagged);
    ++table.spatial_queries;
    if (flagged) ++table.flagged_queries;
    for (std::size_t m = 0; m < kMandatoryCount; ++m) {
      row.p_space[m] = space.at(mandatory_activities()[m]);
      row.bid[m] = row.p_time[m] * row.w_stab * row.p_space[m];
    }
  }
  return table;
}

namespace {

// Best and runner-up bid over the rows where `eligible` holds; ties keep the
// earlier row, which is the lower location_id.
struct TopTwo {
  std::size_t best_row = 0;
  double best = -1.0;
  double second = 0.0;
  std::size_t count = 0;
};

template <typename Eligible>
TopTwo top_two(const BidTable& table, std::size_t activity_idx, Eligible&& eligible) {
  TopTwo t;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!eligible(i)) continue;
    ++t.count;
    double b = table.rows[i].bid[activity_idx];
    if (b > t.best) {
      t.second = t.count > 1 ? t.best : 0.0;
      t.best = b;
      t.best_row = i;
    } else {
      t.second = std::max(t.second, b);
    }
  }
  return t;
}

double margin_confidence(double best, double second) {
  if (!(best > 0.0)) return 0.0;
  return std::clamp((best - second) / best, 0.0, 1.0);
}

}  // namespace

MandatoryAssignment select_anchors(std::span<const CandidateLocation> locations,
                                   const BidTable& table, double theta_exist,
                                   bool per_activity_bidding) {
  MandatoryAssignment out;
  auto is_candidate = [&](std::size_t i) { return locations[i].candidate; };

  TopTwo home = top_two(table, 0, is_candidate);
  if (home.count == 0 || !(home.best > 0.0)) return out;  // no home evidence
  out.home = {locations[home.best_row].location_id, Activity::Home,
              home.count == 1 ? 1.0 : margin_confidence(home.best, home.second)};

  auto remaining = [&](std::size_t i) { return is_candidate(i) && i != home.best_row; };
  constexpr std::size_t kWork = 1;
  constexpr std::size_t kSchool = 2;

  std::size_t chosen_row = 0;
  std::size_t chosen_activity = kWork;
  if (per_activity_bidding) {
    // Prose variant: Work and School compete directly on their own bids.
    TopTwo work = top_two(table, kWork, remaining);
    TopTwo school = top_two(table, kSchool, remaining);
    if (work.count == 0) return out;
    bool school_wins = school.best > work.best;
    const TopTwo& sel = school_wins ? school : work;
    if (!(sel.best > 0.0) || sel.best < theta_exist) return out;
    chosen_row = sel.best_row;
    chosen_activity = school_wins ? kSchool : kWork;
  } else {
    // Listing variant: select the location on Work bids, then resolve the
    // type by which spatial likelihood is larger at that location.
    TopTwo work = top_two(table, kWork, remaining);
    if (work.count == 0 || !(work.best > 0.0) || work.best < theta_exist) return out;
    chosen_row = work.best_row;
    const BidRow& row = table.rows[chosen_row];
    chosen_activity = row.p_space[kSchool] > row.p_space[kWork] ? kSchool : kWork;
  }

  // Confidence margin is evaluated on the chosen activity's bids.
  double best = table.rows[chosen_row].bid[chosen_activity];
  if (!(best > 0.0)) return out;
  double second = 0.0;
  std::size_t others = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!remaining(i) || i == chosen_row) continue;
    ++others;
    second = std::max(second, table.rows[i].bid[chosen_activity]);
  }
  double confidence = others == 0 ? 1.0 : margin_confidence(best, second);
  out.second = {locations[chosen_row].location_id, mandatory_activities()[chosen_activity],
                confidence};
  return out;
}

MandatoryAssignment run_bidding(std::span<const CandidateLocation> locations,
                                std::span<const Staypoint> agent_staypoints,
                                const ReferenceStats& ref, const ZoneIndex& zones,
                                const MandatoryCaps& caps, double theta_exist,
                                bool per_activity_bidding, BidTable* table_out) {
  BidTable table = compute_bids(locations, agent_staypoints, ref, zones, caps);
  MandatoryAssignment assignment =
      select_anchors(locations, table, theta_exist, per_activity_bidding);
  if (table_out) *table_out = std::move(table);
  return assignment;
}

void label_mandatory(std::span<Staypoint> agent_staypoints,
                     std::span<const CandidateLocation> locations,
                     const MandatoryAssignment& assignment) {
  auto apply = [&](const MandatoryAssignment::Anchor& anchor) {
    for (const CandidateLocation& loc : locations) {
      if (loc.location_id != anchor.location_id) continue;
      for (std::size_t idx : loc.members) {
        agent_staypoints[idx].label = anchor.type;
        agent_staypoints[idx].confidence = anchor.confidence;
      }
      return;
    }
    fail(ErrorKind::IncompleteInference,
         "assignment references unknown location_id " + std::to_string(anchor.location_id));
  };
  if (assignment.home) apply(*assignment.home);
  if (assignment.second) apply(*assignment.second);
}

}  // namespace tripurpose
