#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tripurpose/extraction.hpp"
#include "tripurpose/mandatory.hpp"
#include "tripurpose/nonmandatory.hpp"

namespace tripurpose {

// Every knob of the labeling pipeline in one place. The calibration phases
// mutate disjoint subsets of these (see gene_table); extraction thresholds
// stay fixed so staypoints can be extracted once and reused.
struct PipelineParams {
  ExtractionParams extraction;

  // Per-agent recurrent-location clustering.
  double eps_agent_m = 100.0;
  std::size_t min_pts_agent = 1;

  // POI zone clustering and the spatial likelihood kernel.
  double eps_poi_m = 100.0;
  std::size_t min_pts_poi = 3;
  double sigma_m = 150.0;
  double search_radius_m = 500.0;

  // Mandatory bidding.
  MandatoryCaps caps;
  double exist_frac = 0.05;  // second-anchor threshold as a fraction of the
                             // median positive home bid across agents
  bool per_activity_bidding = false;

  // Non-mandatory scoring.
  NonMandatoryParams scoring;

  // Confidence shaping (calibration phase 3): the mandatory margin scale and
  // the non-mandatory posterior temperature, both argmax-preserving.
  double gamma_margin = 1.0;
  double gamma_posterior = 1.0;

  double hcr_threshold = 0.5;

  void validate() const;
};

// One calibratable parameter: its phase, bounds, and accessors into
// PipelineParams. Integer-valued targets round on assignment.
struct GeneSpec {
  std::string_view name;
  int phase = 0;
  double lo = 0.0;
  double hi = 0.0;
  double (*get)(const PipelineParams&) = nullptr;
  void (*set)(PipelineParams&, double) = nullptr;
};

std::span<const GeneSpec> gene_table();
std::vector<std::size_t> genes_for_phase(int phase);

std::vector<double> extract_genes(const PipelineParams& params,
                                  std::span<const std::size_t> gene_indices);

// Writes gene values back, clamping to bounds, then restores cross-gene
// invariants (the duration exponent schedule is sorted to stay
// non-decreasing).
void apply_genes(PipelineParams& params, std::span<const std::size_t> gene_indices,
                 std::span<const double> values);

}  // namespace tripurpose
