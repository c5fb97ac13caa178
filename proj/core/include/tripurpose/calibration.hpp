#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tripurpose/ingest.hpp"
#include "tripurpose/metrics.hpp"
#include "tripurpose/nsga2.hpp"
#include "tripurpose/params.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

struct CalibrationSettings {
  Nsga2Settings nsga;                        // population/operators shared by phases
  std::array<std::size_t, 3> generations{30, 30, 30};  // per-phase budgets
  std::size_t subsample_agents = 20000;

  // Search box per gene, in gene_table order. Empty means the table defaults;
  // anything else must cover the whole table.
  std::vector<GeneBounds> gene_bounds;
};

struct PhaseTrace {
  int phase = 0;
  std::vector<Individual> front;     // deduplicated final front
  std::vector<double> knee_genes;
  std::vector<double> knee_objectives;
  EvalReport report;                 // subsample report with the knee applied
  std::size_t evaluations = 0;       // objective-cache misses
  std::vector<std::string> warnings;
};

struct CalibrationResult {
  PipelineParams params;       // all knee genes applied
  EvalReport baseline_report;  // starting parameters on the subsample
  std::vector<PhaseTrace> phases;
  EvalReport final_report;     // calibrated parameters on the full corpus
};

// Literal knee rule: objectives are normalized to [0,1] over the front, the
// chord connects the two extreme points (best in each objective), and the
// point with the maximum perpendicular distance to the chord wins. A 1-point
// front returns that point; a degenerate chord returns the first point.
std::size_t knee_index(std::span<const Individual> front);

// Three-phase calibration. Phase 1 searches the spatial/bidding genes against
// (jsd_freq, jsd_start) with full relabeling runs; phase 2 searches the
// scoring genes against (jsd_start, jsd_dur) by re-scoring cached factor
// inputs; phase 3 searches the confidence transforms against the negated
// high-confidence rates with labels frozen. After each phase one front point
// is chosen - the knee among the points that do not worsen the phase's
// incumbent objectives, so a calibrated metric never regresses past its
// starting value - and its genes are frozen into the parameter set. A phase
// with budget 0 keeps the incumbent genes and only records the trace entry.
// Worsening a previously frozen headline metric by more than 0.01 is recorded
// as a warning in the trace, not an error.
CalibrationResult run_phases(const StaypointCorpus& staypoints, std::span<const Poi> pois,
                             const ReferenceStats& ref, const PipelineParams& start,
                             const CalibrationSettings& settings, unsigned workers = 1);

}  // namespace tripurpose
