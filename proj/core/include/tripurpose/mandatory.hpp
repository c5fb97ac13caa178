#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "tripurpose/extraction.hpp"
#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"
#include "tripurpose/zones.hpp"

namespace tripurpose {

// Per-day caps on accumulated reference time mass, expressed as fractions of
// one day's prior; they damp anomalous marathon visits. Indexed like
// mandatory_activities(): Home, Work, School.
struct MandatoryCaps {
  std::array<double, kMandatoryCount> tau{1.0, 0.6, 0.5};

  double& at(Activity a) { return tau[mandatory_index(a)]; }
  double at(Activity a) const { return tau[mandatory_index(a)]; }

  static std::size_t mandatory_index(Activity a);
};

// One candidate location's bidding factors for Home/Work/School.
struct BidRow {
  std::array<double, kMandatoryCount> p_time{};
  double w_stab = 0.0;
  std::array<double, kMandatoryCount> p_space{};
  std::array<double, kMandatoryCount> bid{};
};

// Parallel to the candidate-location list; non-candidates (fewer than two
// visit days) keep an all-zero row and never win.
struct BidTable {
  std::vector<BidRow> rows;
  std::size_t spatial_queries = 0;
  std::size_t flagged_queries = 0;  // queries with no zone in range
};

struct MandatoryAssignment {
  struct Anchor {
    int location_id = 0;
    Activity type = Activity::Home;
    double confidence = 0.0;
  };
  std::optional<Anchor> home;
  std::optional<Anchor> second;  // Work or School
};

// Accumulated reference time mass for the staypoints of one location: per
// local day, the reference time-of-day profile is integrated over each stay
// via 15-minute slot overlaps, capped at tau per day, and summed across days.
// Work and School collect nothing on Saturdays or Sundays.
std::array<double, kMandatoryCount> time_evidence(std::span<const Staypoint> agent_staypoints,
                                                  std::span<const std::size_t> members,
                                                  const ReferenceStats& ref,
                                                  const MandatoryCaps& caps);

// Fills the full bid table: bid = time evidence x day-count stability weight
// x spatial likelihood at the cluster centroid.
BidTable compute_bids(std::span<const CandidateLocation> locations,
                      std::span<const Staypoint> agent_staypoints, const ReferenceStats& ref,
                      const ZoneIndex& zones, const MandatoryCaps& caps);

// Picks the home anchor by best Home bid (margin-based confidence), then the
// second anchor among the remaining locations. By default the second anchor
// is selected on Work bids and its Work-vs-School type is resolved by spatial
// likelihood; with per_activity_bidding the two activities compete directly.
// A best bid below theta_exist (or not positive) leaves the anchor unset.
MandatoryAssignment select_anchors(std::span<const CandidateLocation> locations,
                                   const BidTable& table, double theta_exist,
                                   bool per_activity_bidding = false);

MandatoryAssignment run_bidding(std::span<const CandidateLocation> locations,
                                std::span<const Staypoint> agent_staypoints,
                                const ReferenceStats& ref, const ZoneIndex& zones,
                                const MandatoryCaps& caps, double theta_exist,
                                bool per_activity_bidding = false, BidTable* table_out = nullptr);

// Writes (type, confidence) onto every staypoint of each winning cluster;
// everything else is left unlabeled for non-mandatory scoring.
void label_mandatory(std::span<Staypoint> agent_staypoints,
                     std::span<const CandidateLocation> locations,
                     const MandatoryAssignment& assignment);

}  // namespace tripurpose
