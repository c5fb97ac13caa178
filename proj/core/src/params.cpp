#include "tripurpose/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tripurpose/error.hpp"

namespace tripurpose {

void PipelineParams::validate() const {
  if (!(extraction.d_max_m > 0.0)) fail(ErrorKind::Config, "d_max must be positive");
  if (!(extraction.t_min_s >= 0.0)) fail(ErrorKind::Config, "t_min must be non-negative");
  if (!(extraction.gap_max_s > 0.0)) fail(ErrorKind::Config, "gap_max must be positive");
  if (!(eps_agent_m > 0.0)) fail(ErrorKind::Config, "eps_agent must be positive");
  if (min_pts_agent < 1) fail(ErrorKind::Config, "min_pts_agent must be at least 1");
  if (!(eps_poi_m > 0.0)) fail(ErrorKind::Config, "eps_poi must be positive");
  if (min_pts_poi < 1) fail(ErrorKind::Config, "min_pts_poi must be at least 1");
  if (!(sigma_m > 0.0)) fail(ErrorKind::Config, "sigma must be positive");
  if (!(search_radius_m > 0.0)) fail(ErrorKind::Config, "search_radius must be positive");
  for (double tau : caps.tau) {
    if (!(tau > 0.0)) fail(ErrorKind::Config, "daily caps must be positive");
  }
  if (!(exist_frac >= 0.0)) fail(ErrorKind::Config, "exist_frac must be non-negative");
  scoring.validate();
  if (!(gamma_margin > 0.0)) fail(ErrorKind::Config, "gamma_margin must be positive");
  if (!(gamma_posterior > 0.0)) fail(ErrorKind::Config, "gamma_posterior must be positive");
  if (!(hcr_threshold >= 0.0 && hcr_threshold <= 1.0)) {
    fail(ErrorKind::Config, "hcr_threshold must lie in [0,1]");
  }
}

namespace {

constexpr std::array<GeneSpec, 16> kGenes{{
    {"sigma_m", 1, 30.0, 600.0, [](const PipelineParams& p) { return p.sigma_m; },
     [](PipelineParams& p, double v) { p.sigma_m = v; }},
    {"search_radius_m", 1, 100.0, 1500.0,
     [](const PipelineParams& p) { return p.search_radius_m; },
     [](PipelineParams& p, double v) { p.search_radius_m = v; }},
    {"eps_poi_m", 1, 30.0, 300.0, [](const PipelineParams& p) { return p.eps_poi_m; },
     [](PipelineParams& p, double v) { p.eps_poi_m = v; }},
    {"eps_agent_m", 1, 30.0, 300.0, [](const PipelineParams& p) { return p.eps_agent_m; },
     [](PipelineParams& p, double v) { p.eps_agent_m = v; }},
    {"tau_home", 1, 0.1, 1.0, [](const PipelineParams& p) { return p.caps.tau[0]; },
     [](PipelineParams& p, double v) { p.caps.tau[0] = v; }},
    {"tau_work", 1, 0.05, 1.0, [](const PipelineParams& p) { return p.caps.tau[1]; },
     [](PipelineParams& p, double v) { p.caps.tau[1] = v; }},
    {"tau_school", 1, 0.05, 1.0, [](const PipelineParams& p) { return p.caps.tau[2]; },
     [](PipelineParams& p, double v) { p.caps.tau[2] = v; }},
    {"exist_frac", 1, 0.0, 0.5, [](const PipelineParams& p) { return p.exist_frac; },
     [](PipelineParams& p, double v) { p.exist_frac = v; }},

    {"score_eps", 2, 1e-6, 1e-2, [](const PipelineParams& p) { return p.scoring.eps; },
     [](PipelineParams& p, double v) { p.scoring.eps = v; }},
    {"alpha_short", 2, 0.05, 1.0, [](const PipelineParams& p) { return p.scoring.alpha_short; },
     [](PipelineParams& p, double v) { p.scoring.alpha_short = v; }},
    {"alpha_mid", 2, 0.05, 1.0, [](const PipelineParams& p) { return p.scoring.alpha_mid; },
     [](PipelineParams& p, double v) { p.scoring.alpha_mid = v; }},
    {"alpha_long", 2, 0.05, 1.0, [](const PipelineParams& p) { return p.scoring.alpha_long; },
     [](PipelineParams& p, double v) { p.scoring.alpha_long = v; }},
    {"delta", 2, 0.0, 0.3, [](const PipelineParams& p) { return p.scoring.delta; },
     [](PipelineParams& p, double v) { p.scoring.delta = v; }},
    {"short_bin_cutoff", 2, 0.0, 12.0,
     [](const PipelineParams& p) { return static_cast<double>(p.scoring.short_bin_cutoff); },
     [](PipelineParams& p, double v) {
       p.scoring.short_bin_cutoff = static_cast<int>(std::lround(v));
     }},

    {"gamma_margin", 3, 0.25, 20.0, [](const PipelineParams& p) { return p.gamma_margin; },
     [](PipelineParams& p, double v) { p.gamma_margin = v; }},
    {"gamma_posterior", 3, 0.25, 8.0, [](const PipelineParams& p) { return p.gamma_posterior; },
     [](PipelineParams& p, double v) { p.gamma_posterior = v; }},
}};

}  // namespace

std::span<const GeneSpec> gene_table() { return kGenes; }

std::vector<std::size_t> genes_for_phase(int phase) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kGenes.size(); ++i) {
    if (kGenes[i].phase == phase) out.push_back(i);
  }
  if (out.empty()) fail(ErrorKind::Config, "no genes in phase " + std::to_string(phase));
  return out;
}

std::vector<double> extract_genes(const PipelineParams& params,
                                  std::span<const std::size_t> gene_indices) {
  std::vector<double> values;
  values.reserve(gene_indices.size());
  for (std::size_t gi : gene_indices) values.push_back(kGenes[gi].get(params));
  return values;
}

void apply_genes(PipelineParams& params, std::span<const std::size_t> gene_indices,
                 std::span<const double> values) {
  if (gene_indices.size() != values.size()) {
    fail(ErrorKind::Config, "gene index/value count mismatch");
  }
  for (std::size_t i = 0; i < gene_indices.size(); ++i) {
    const GeneSpec& g = kGenes[gene_indices[i]];
    g.set(params, std::clamp(values[i], g.lo, g.hi));
  }
  // The exponent schedule must be non-decreasing in the bin index; searching
  // the three exponents independently is easier when any ordering decodes to
  // a valid schedule.
  std::array<double, 3> alphas{params.scoring.alpha_short, params.scoring.alpha_mid,
                               params.scoring.alpha_long};
  std::sort(alphas.begin(), alphas.end());
  params.scoring.alpha_short = alphas[0];
  params.scoring.alpha_mid = alphas[1];
  params.scoring.alpha_long = alphas[2];
}

}  // namespace tripurpose
