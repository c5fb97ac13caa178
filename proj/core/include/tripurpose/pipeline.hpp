#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tripurpose/ingest.hpp"
#include "tripurpose/metrics.hpp"
#include "tripurpose/params.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

// Per-staypoint intermediates kept so the calibration phases can re-score
// without re-running the spatial stages: phase 2 re-derives non-mandatory
// labels from the cached factor inputs, phase 3 only reshapes confidences.
struct LabelingCaches {
  struct MandatoryPoint {
    std::uint32_t agent = 0;
    std::uint32_t point = 0;
    double margin = 0.0;  // anchor bid margin before the gamma transform
  };
  struct NonMandatoryPoint {
    std::uint32_t agent = 0;
    std::uint32_t point = 0;
    std::uint32_t space = 0;  // index into space_vectors
    std::uint16_t slot = 0;
    std::uint16_t bin = 0;
  };

  std::vector<MandatoryPoint> mandatory;
  std::vector<NonMandatoryPoint> nonmandatory;
  std::vector<ProbVector> space_vectors;  // one per recurrent location with
                                          // unlabeled members (snapped query)
  // Temperature-free posteriors, parallel to `nonmandatory`.
  std::vector<std::array<double, kNonMandatoryCount>> posteriors;
  LabelHistograms mandatory_hist;  // label counts from the mandatory stage only
};

struct LabelingResult {
  StaypointCorpus labeled;
  double theta_exist = 0.0;  // resolved absolute second-anchor threshold
  std::size_t spatial_queries = 0;
  std::size_t flagged_queries = 0;
  EvalReport report;
  LabelingCaches caches;  // populated only when requested
};

// Runs the full labeling pipeline on extracted staypoints: per-agent
// recurrent-location clustering, POI zone construction, mandatory bidding
// with the corpus-wide second-anchor threshold (a fraction of the median
// positive home bid), then multiplicative scoring for everything left.
LabelingResult label_corpus(const StaypointCorpus& staypoints, std::span<const Poi> pois,
                            const ReferenceStats& ref, const PipelineParams& params,
                            unsigned workers = 1, bool build_caches = false);

// Deterministic strided agent selection used to keep calibration evaluations
// affordable; returns the whole corpus when it has at most max_agents agents.
StaypointCorpus subsample_agents(const StaypointCorpus& corpus, std::size_t max_agents);

// Re-scores the non-mandatory staypoints of `result` in place from the cached
// factor inputs (labels, confidences, and cached posteriors all refresh).
void rescore_nonmandatory(LabelingResult& result, const ReferenceStats& ref,
                          const PipelineParams& params);

// Re-derives every confidence from the cached margins/posteriors through the
// current gamma transforms; labels are untouched by construction.
void apply_confidence_transforms(LabelingResult& result, const PipelineParams& params);

// Rebuilds result.report from the labeled corpus (after one of the in-place
// updates above).
void refresh_report(LabelingResult& result, const ReferenceStats& ref, double tau_c);

// Confidence of a posterior sharpened by the temperature exponent: the
// maximum of p_k^gamma renormalized. Monotone in gamma and argmax-preserving.
double sharpened_confidence(std::span<const double> posterior, double gamma);

}  // namespace tripurpose
