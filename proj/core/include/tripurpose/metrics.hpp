#pragma once

#include <array>
#include <span>

#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

// Headline numbers of one labeled corpus against the reference statistics.
// The three divergences are the calibration objectives; the high-confidence
// rates are split by activity class. flagged_query_fraction is filled by the
// pipeline, which knows how many spatial queries fell outside zone coverage.
struct EvalReport {
  double jsd_freq = 0.0;
  double jsd_start = 0.0;
  double jsd_dur = 0.0;
  double hcr_mandatory = 0.0;
  double hcr_nonmandatory = 0.0;
  bool hcr_mandatory_empty = false;
  bool hcr_nonmandatory_empty = false;
  std::size_t staypoint_count = 0;
  double flagged_query_fraction = 0.0;
};

// Raw label-count histograms of a fully labeled corpus (unnormalized).
struct LabelHistograms {
  std::array<double, kActivityCount> freq{};
  std::array<SlotHistogram, kActivityCount> start{};
  std::array<BinHistogram, kActivityCount> duration{};
  std::size_t total = 0;
};

// Jensen-Shannon divergence, log base 2, so the result lies in [0,1]. Inputs
// are renormalized defensively; zero entries contribute nothing.
double jsd(std::span<const double> p, std::span<const double> q);

enum class TemporalDimension { Start, Duration };

// Share-weighted mean of per-activity JSDs between inferred histograms and
// the reference priors. Activities with zero reference share or an absent
// reference histogram are skipped and the weights renormalized over the rest;
// an activity that was never predicted counts as maximally divergent.
double weighted_temporal_jsd(const LabelHistograms& inferred, const ReferenceStats& ref,
                             TemporalDimension dimension);

// Fraction of staypoints in the class whose confidence reaches tau_c. An
// empty class yields 0 and sets *empty.
double hcr(const StaypointCorpus& corpus, double tau_c, ActivityClass filter,
           bool* empty = nullptr);

// Counts labels into frequency/start-slot/duration-bin histograms; every
// staypoint must be labeled.
LabelHistograms accumulate_histograms(const StaypointCorpus& corpus, int timezone_offset_min);

EvalReport build_report(const StaypointCorpus& corpus, const ReferenceStats& ref,
                        double tau_c = 0.5);

}  // namespace tripurpose
