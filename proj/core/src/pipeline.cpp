#include "tripurpose/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "tripurpose/error.hpp"
#include "tripurpose/extraction.hpp"
#include "tripurpose/mandatory.hpp"
#include "tripurpose/nonmandatory.hpp"
#include "tripurpose/parallel.hpp"
#include "tripurpose/time_grid.hpp"
#include "tripurpose/zones.hpp"

namespace tripurpose {
namespace {

// Everything computed independently for one agent.
struct AgentWork {
  std::vector<CandidateLocation> locations;
  BidTable bids;
  MandatoryAssignment assignment;
};

double median(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double best_home_bid(const AgentWork& work) {
  double best = 0.0;
  for (std::size_t i = 0; i < work.bids.rows.size(); ++i) {
    if (!work.locations[i].candidate) continue;
    best = std::max(best, work.bids.rows[i].bid[0]);
  }
  return best;
}

}  // namespace

double sharpened_confidence(std::span<const double> posterior, double gamma) {
  double best = 0.0;
  double total = 0.0;
  for (double p : posterior) {
    double s = std::pow(p, gamma);
    best = std::max(best, s);
    total += s;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    return 1.0 / static_cast<double>(posterior.size());
  }
  return best / total;
}

LabelingResult label_corpus(const StaypointCorpus& staypoints, std::span<const Poi> pois,
                            const ReferenceStats& ref, const PipelineParams& params,
                            unsigned workers, bool build_caches) {
  params.validate();

  LabelingResult result;
  result.labeled = staypoints;  // labels start empty
  for (auto& agent : result.labeled) {
    for (auto& sp : agent.points) {
      sp.label.reset();
      sp.confidence.reset();
    }
  }

  ZoneIndex zones(build_zones(pois, params.eps_poi_m, params.min_pts_poi), params.sigma_m,
                  params.search_radius_m);

  // Pass 1: per-agent location clustering and bid tables.
  std::vector<AgentWork> work(result.labeled.size());
  parallel_for(result.labeled.size(), workers, [&](std::size_t ai) {
    const auto& points = result.labeled[ai].points;
    work[ai].locations = cluster_agent_staypoints(points, params.eps_agent_m,
                                                  params.min_pts_agent, ref.timezone_offset_min);
    work[ai].bids = compute_bids(work[ai].locations, points, ref, zones, params.caps);
  });

  // The second-anchor threshold is a fraction of the median winning home bid.
  std::vector<double> home_bids;
  home_bids.reserve(work.size());
  for (const auto& w : work) {
    double bid = best_home_bid(w);
    if (bid > 0.0) home_bids.push_back(bid);
  }
  result.theta_exist = params.exist_frac * median(home_bids);

  // Pass 2: anchor selection and mandatory labels.
  parallel_for(result.labeled.size(), workers, [&](std::size_t ai) {
    work[ai].assignment = select_anchors(work[ai].locations, work[ai].bids, result.theta_exist,
                                         params.per_activity_bidding);
    label_mandatory(result.labeled[ai].points, work[ai].locations, work[ai].assignment);
  });

  // Pass 3: non-mandatory scoring at snapped locations, one spatial query per
  // recurrent location that still has unlabeled members.
  auto corrected_dur = correct_duration_prior(ref.duration_prior, params.scoring);
  struct AgentScores {
    std::vector<ProbVector> space_vectors;
    std::vector<LabelingCaches::NonMandatoryPoint> points;  // space is local index
    std::vector<std::array<double, kNonMandatoryCount>> posteriors;
    std::size_t queries = 0;
    std::size_t flags = 0;
  };
  std::vector<AgentScores> scores(result.labeled.size());
  parallel_for(result.labeled.size(), workers, [&](std::size_t ai) {
    auto& agent = result.labeled[ai];
    auto& out = scores[ai];
    for (const CandidateLocation& loc : work[ai].locations) {
      bool any_unlabeled = false;
      for (std::size_t idx : loc.members) {
        if (!agent.points[idx].labeled()) {
          any_unlabeled = true;
          break;
        }
      }
      if (!any_unlabeled) continue;

      bool flagged = false;
      ProbVector space = zones.spatial_likelihood(loc.centroid, &flagged);
      ++out.queries;
      if (flagged) ++out.flags;
      auto space_idx = static_cast<std::uint32_t>(out.space_vectors.size());
      out.space_vectors.push_back(space);

      for (std::size_t idx : loc.members) {
        auto& sp = agent.points[idx];
        if (sp.labeled()) continue;
        auto slot = static_cast<std::uint16_t>(slot_of(sp.t_start, ref.timezone_offset_min));
        auto bin = static_cast<std::uint16_t>(duration_bin(sp.duration_s()));
        NonMandatoryScore score =
            score_from_factors(space, slot, bin, ref, corrected_dur, params.scoring);
        sp.label = score.label;
        sp.confidence = params.gamma_posterior == 1.0
                            ? score.confidence
                            : sharpened_confidence(score.posterior, params.gamma_posterior);
        out.points.push_back({static_cast<std::uint32_t>(ai), static_cast<std::uint32_t>(idx),
                              space_idx, slot, bin});
        out.posteriors.push_back(score.posterior);
      }
    }
  });

  // Mandatory confidences pass through the margin transform.
  for (std::size_t ai = 0; ai < result.labeled.size(); ++ai) {
    for (auto& sp : result.labeled[ai].points) {
      if (sp.labeled() && class_of(*sp.label) == ActivityClass::Mandatory) {
        sp.confidence = std::clamp(params.gamma_margin * *sp.confidence, 0.0, 1.0);
      }
    }
  }

  // Merge per-agent tallies in agent order so worker count cannot matter.
  for (std::size_t ai = 0; ai < work.size(); ++ai) {
    result.spatial_queries += work[ai].bids.spatial_queries + scores[ai].queries;
    result.flagged_queries += work[ai].bids.flagged_queries + scores[ai].flags;
  }

  if (build_caches) {
    auto& caches = result.caches;
    for (std::size_t ai = 0; ai < result.labeled.size(); ++ai) {
      const auto& agent = result.labeled[ai];
      const auto& assignment = work[ai].assignment;
      auto record_anchor = [&](const MandatoryAssignment::Anchor& anchor) {
        for (const CandidateLocation& loc : work[ai].locations) {
          if (loc.location_id != anchor.location_id) continue;
          for (std::size_t idx : loc.members) {
            caches.mandatory.push_back({static_cast<std::uint32_t>(ai),
                                        static_cast<std::uint32_t>(idx), anchor.confidence});
          }
          return;
        }
      };
      if (assignment.home) record_anchor(*assignment.home);
      if (assignment.second) record_anchor(*assignment.second);

      auto base = static_cast<std::uint32_t>(caches.space_vectors.size());
      caches.space_vectors.insert(caches.space_vectors.end(), scores[ai].space_vectors.begin(),
                                  scores[ai].space_vectors.end());
      for (std::size_t i = 0; i < scores[ai].points.size(); ++i) {
        auto p = scores[ai].points[i];
        p.space += base;
        caches.nonmandatory.push_back(p);
        caches.posteriors.push_back(scores[ai].posteriors[i]);
      }

      for (const auto& sp : agent.points) {
        if (!sp.labeled() || class_of(*sp.label) != ActivityClass::Mandatory) continue;
        std::size_t a = index_of(*sp.label);
        caches.mandatory_hist.freq[a] += 1.0;
        caches.mandatory_hist.start[a][slot_of(sp.t_start, ref.timezone_offset_min)] += 1.0;
        caches.mandatory_hist.duration[a][duration_bin(sp.duration_s())] += 1.0;
        ++caches.mandatory_hist.total;
      }
    }
  }

  result.report = build_report(result.labeled, ref, params.hcr_threshold);
  result.report.flagged_query_fraction =
      result.spatial_queries == 0 ? 0.0
                                  : static_cast<double>(result.flagged_queries) /
                                        static_cast<double>(result.spatial_queries);
  return result;
}

StaypointCorpus subsample_agents(const StaypointCorpus& corpus, std::size_t max_agents) {
  if (max_agents == 0) fail(ErrorKind::Config, "subsample size must be positive");
  if (corpus.size() <= max_agents) return corpus;
  StaypointCorpus out;
  out.reserve(max_agents);
  for (std::size_t i = 0; i < max_agents; ++i) {
    out.push_back(corpus[i * corpus.size() / max_agents]);
  }
  return out;
}

void rescore_nonmandatory(LabelingResult& result, const ReferenceStats& ref,
                          const PipelineParams& params) {
  auto corrected_dur = correct_duration_prior(ref.duration_prior, params.scoring);
  const auto& caches = result.caches;
  for (std::size_t i = 0; i < caches.nonmandatory.size(); ++i) {
    const auto& p = caches.nonmandatory[i];
    NonMandatoryScore score = score_from_factors(caches.space_vectors[p.space], p.slot, p.bin, ref,
                                                 corrected_dur, params.scoring);
    auto& sp = result.labeled[p.agent].points[p.point];
    sp.label = score.label;
    sp.confidence = params.gamma_posterior == 1.0
                        ? score.confidence
                        : sharpened_confidence(score.posterior, params.gamma_posterior);
    result.caches.posteriors[i] = score.posterior;
  }
}

void apply_confidence_transforms(LabelingResult& result, const PipelineParams& params) {
  const auto& caches = result.caches;
  for (const auto& m : caches.mandatory) {
    result.labeled[m.agent].points[m.point].confidence =
        std::clamp(params.gamma_margin * m.margin, 0.0, 1.0);
  }
  for (std::size_t i = 0; i < caches.nonmandatory.size(); ++i) {
    const auto& p = caches.nonmandatory[i];
    result.labeled[p.agent].points[p.point].confidence =
        sharpened_confidence(caches.posteriors[i], params.gamma_posterior);
  }
}

void refresh_report(LabelingResult& result, const ReferenceStats& ref, double tau_c) {
  double flagged_fraction = result.report.flagged_query_fraction;
  result.report = build_report(result.labeled, ref, tau_c);
  result.report.flagged_query_fraction = flagged_fraction;
}

}  // namespace tripurpose
