#pragma once

#include <array>
#include <vector>

#include "tripurpose/activity.hpp"
#include "tripurpose/prob_vector.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {

using SlotHistogram = std::array<double, kSlotsPerDay>;
using BinHistogram = std::array<double, kDurationBins>;

// Survey-derived priors: overall activity shares plus per-activity start-time
// and duration histograms. Histograms are normalized per activity, or all
// zero when the survey has no records for that activity (flagged on load).
struct ReferenceStats {
  ProbVector activity_shares;
  std::array<SlotHistogram, kActivityCount> start_time_prior{};
  std::array<BinHistogram, kActivityCount> duration_prior{};
  int timezone_offset_min = 0;
  std::array<bool, kActivityCount> start_absent{};
  std::array<bool, kActivityCount> duration_absent{};

  const SlotHistogram& start_prior(Activity a) const {
    return start_time_prior[index_of(a)];
  }
  const BinHistogram& dur_prior(Activity a) const {
    return duration_prior[index_of(a)];
  }
};

// Built-in priors with realistic day shapes (evening home returns, morning
// work starts, short pickup stops, ...). Used as the seed reference for the
// synthetic corpus generator and as the default when no survey file is given.
ReferenceStats default_reference_stats(int timezone_offset_min = -480);

}  // namespace tripurpose
