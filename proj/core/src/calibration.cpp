#include "tripurpose/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "tripurpose/error.hpp"
#include "tripurpose/pipeline.hpp"

namespace tripurpose {

namespace {

// Memoizes genome -> objectives. Elitist survival re-visits genomes every
// generation, so this avoids re-running the expensive evaluations; the miss
// count is what the trace reports as "evaluations".
class ObjectiveCache {
 public:
  explicit ObjectiveCache(EvalFn fn) : fn_(std::move(fn)) {}

  std::vector<double> operator()(std::span<const double> genes) {
    std::vector<double> key(genes.begin(), genes.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ++misses_;
    std::vector<double> value = fn_(genes);
    cache_.emplace(std::move(key), value);
    return value;
  }

  std::size_t misses() const { return misses_; }

 private:
  EvalFn fn_;
  std::map<std::vector<double>, std::vector<double>> cache_;
  std::size_t misses_ = 0;
};

// Perpendicular distance of every front point to the chord between the two
// extreme points, computed in per-objective [0,1] normalized space. All zeros
// when the chord is degenerate (including the 1-point front).
std::vector<double> knee_scores(std::span<const Individual> front) {
  if (front.empty()) fail(ErrorKind::Config, "knee selection on an empty front");
  for (const Individual& ind : front) {
    if (ind.objectives.size() != 2) {
      fail(ErrorKind::Config, "knee selection expects two objectives");
    }
  }
  std::vector<double> scores(front.size(), 0.0);
  if (front.size() == 1) return scores;

  double lo0 = front[0].objectives[0], hi0 = lo0;
  double lo1 = front[0].objectives[1], hi1 = lo1;
  for (const Individual& ind : front) {
    lo0 = std::min(lo0, ind.objectives[0]);
    hi0 = std::max(hi0, ind.objectives[0]);
    lo1 = std::min(lo1, ind.objectives[1]);
    hi1 = std::max(hi1, ind.objectives[1]);
  }
  auto norm = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };

  // Extreme points: best in each objective, ties broken toward the other
  // objective and then the lowest index.
  std::size_t a = 0, b = 0;
  for (std::size_t i = 1; i < front.size(); ++i) {
    const auto& o = front[i].objectives;
    if (o[0] < front[a].objectives[0] ||
        (o[0] == front[a].objectives[0] && o[1] < front[a].objectives[1])) {
      a = i;
    }
    if (o[1] < front[b].objectives[1] ||
        (o[1] == front[b].objectives[1] && o[0] < front[b].objectives[0])) {
      b = i;
    }
  }
  double ax = norm(front[a].objectives[0], lo0, hi0);
  double ay = norm(front[a].objectives[1], lo1, hi1);
  double bx = norm(front[b].objectives[0], lo0, hi0);
  double by = norm(front[b].objectives[1], lo1, hi1);
  double chord = std::hypot(bx - ax, by - ay);
  if (chord <= 0.0) return scores;

  for (std::size_t i = 0; i < front.size(); ++i) {
    double px = norm(front[i].objectives[0], lo0, hi0);
    double py = norm(front[i].objectives[1], lo1, hi1);
    scores[i] = std::abs((bx - ax) * (ay - py) - (by - ay) * (ax - px)) / chord;
  }
  return scores;
}

// Knee restricted to front points that keep every incumbent objective (so a
// phase can only hold or improve what it optimizes) and that pass the
// optional extra guard. Constraints relax one at a time, with a warning, if
// nothing qualifies.
std::size_t pick_front_point(std::span<const Individual> front,
                             std::span<const double> incumbent_objectives,
                             const std::function<bool(std::size_t)>& extra_guard, int phase,
                             std::vector<std::string>& warnings) {
  std::vector<double> scores = knee_scores(front);

  auto holds_incumbent = [&](std::size_t i) {
    for (std::size_t j = 0; j < incumbent_objectives.size(); ++j) {
      if (front[i].objectives[j] > incumbent_objectives[j] + 1e-12) return false;
    }
    return true;
  };
  auto best_where = [&](const std::function<bool(std::size_t)>& ok) {
    std::size_t best = front.size();
    for (std::size_t i = 0; i < front.size(); ++i) {
      if (!ok(i)) continue;
      if (best == front.size() || scores[i] > scores[best]) best = i;
    }
    return best;
  };

  std::size_t pick = best_where(
      [&](std::size_t i) { return holds_incumbent(i) && (!extra_guard || extra_guard(i)); });
  if (pick == front.size() && extra_guard) {
    warnings.push_back("phase " + std::to_string(phase) +
                       ": no front point passes the frozen-metric guard; keeping only the "
                       "incumbent-objective constraint");
    pick = best_where(holds_incumbent);
  }
  if (pick == front.size()) {
    warnings.push_back("phase " + std::to_string(phase) +
                       ": no front point preserves the incumbent objectives; using the "
                       "unrestricted knee");
    pick = best_where([](std::size_t) { return true; });
  }
  return pick;
}

// Exact-duplicate genomes (surviving elitist copies) add nothing to the trace.
std::vector<Individual> dedupe_front(std::vector<Individual> front) {
  std::vector<Individual> out;
  out.reserve(front.size());
  for (auto& ind : front) {
    bool seen = false;
    for (const auto& kept : out) {
      if (kept.genes == ind.genes) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(std::move(ind));
  }
  return out;
}

struct PhaseSetup {
  std::vector<std::size_t> gene_indices;
  std::vector<GeneBounds> bounds;
  std::vector<double> incumbent;
};

PhaseSetup phase_setup(const PipelineParams& params, int phase,
                       const CalibrationSettings& settings) {
  PhaseSetup setup;
  setup.gene_indices = genes_for_phase(phase);
  auto table = gene_table();
  if (!settings.gene_bounds.empty() && settings.gene_bounds.size() != table.size()) {
    fail(ErrorKind::Config, "gene_bounds must cover all " + std::to_string(table.size()) +
                                " genes, got " + std::to_string(settings.gene_bounds.size()));
  }
  setup.bounds.reserve(setup.gene_indices.size());
  for (std::size_t gi : setup.gene_indices) {
    GeneBounds b{table[gi].lo, table[gi].hi};
    if (!settings.gene_bounds.empty()) b = settings.gene_bounds[gi];
    if (!(b.lo < b.hi)) {
      fail(ErrorKind::Config,
           std::string("empty search box for gene ") + std::string(table[gi].name));
    }
    setup.bounds.push_back(b);
  }
  setup.incumbent = extract_genes(params, setup.gene_indices);
  return setup;
}

// Frequency/start/duration histogram for candidate scoring genes, rebuilt
// from the cached factor inputs on top of the frozen mandatory counts.
LabelHistograms scored_histograms(const LabelingCaches& caches, const ReferenceStats& ref,
                                  const PipelineParams& params) {
  auto corrected = correct_duration_prior(ref.duration_prior, params.scoring);
  LabelHistograms h = caches.mandatory_hist;
  for (const auto& pt : caches.nonmandatory) {
    NonMandatoryScore score = score_from_factors(caches.space_vectors[pt.space], pt.slot, pt.bin,
                                                 ref, corrected, params.scoring);
    std::size_t a = index_of(score.label);
    h.freq[a] += 1.0;
    h.start[a][pt.slot] += 1.0;
    h.duration[a][pt.bin] += 1.0;
    ++h.total;
  }
  return h;
}

double cached_hcr_mandatory(const LabelingCaches& caches, const PipelineParams& params) {
  if (caches.mandatory.empty()) return 0.0;
  std::size_t high = 0;
  for (const auto& m : caches.mandatory) {
    if (std::clamp(params.gamma_margin * m.margin, 0.0, 1.0) >= params.hcr_threshold) ++high;
  }
  return static_cast<double>(high) / static_cast<double>(caches.mandatory.size());
}

double cached_hcr_nonmandatory(const LabelingCaches& caches, const PipelineParams& params) {
  if (caches.posteriors.empty()) return 0.0;
  std::size_t high = 0;
  for (const auto& post : caches.posteriors) {
    if (sharpened_confidence(post, params.gamma_posterior) >= params.hcr_threshold) ++high;
  }
  return static_cast<double>(high) / static_cast<double>(caches.posteriors.size());
}

void check_frozen(const char* metric, double before, double after, int phase,
                  std::vector<std::string>& warnings) {
  if (after > before + 0.01) {
    warnings.push_back("phase " + std::to_string(phase) + " worsened frozen " + metric + " from " +
                       std::to_string(before) + " to " + std::to_string(after));
  }
}

}  // namespace

std::size_t knee_index(std::span<const Individual> front) {
  std::vector<double> scores = knee_scores(front);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

CalibrationResult run_phases(const StaypointCorpus& staypoints, std::span<const Poi> pois,
                             const ReferenceStats& ref, const PipelineParams& start,
                             const CalibrationSettings& settings, unsigned workers) {
  start.validate();
  if (staypoints.empty()) fail(ErrorKind::EmptyCorpus, "no staypoints to calibrate on");

  PipelineParams params = start;
  StaypointCorpus sub = subsample_agents(staypoints, settings.subsample_agents);

  CalibrationResult result;
  LabelingResult state = label_corpus(sub, pois, ref, params, workers, true);
  result.baseline_report = state.report;

  auto phase_seed = [&](int phase) {
    Nsga2Settings nsga = settings.nsga;
    nsga.generations = settings.generations[static_cast<std::size_t>(phase - 1)];
    nsga.seed = settings.nsga.seed + static_cast<std::uint64_t>(phase);
    return nsga;
  };

  // ---- Phase 1: spatial kernel, clustering radii, and bidding knobs against
  // (jsd_freq, jsd_start). Every evaluation is a full relabeling run.
  {
    PhaseTrace trace;
    trace.phase = 1;
    PhaseSetup setup = phase_setup(params, 1, settings);
    if (settings.generations[0] > 0) {
      ObjectiveCache cache([&](std::span<const double> genes) {
        PipelineParams p = params;
        apply_genes(p, setup.gene_indices, genes);
        LabelingResult r = label_corpus(sub, pois, ref, p, workers, false);
        return std::vector<double>{r.report.jsd_freq, r.report.jsd_start};
      });
      EvalFn eval = [&cache](std::span<const double> genes) { return cache(genes); };
      std::vector<Individual> front =
          dedupe_front(evolve(setup.bounds, setup.incumbent, eval, phase_seed(1)));
      // Guard against the true starting objectives, not a re-evaluation of the
      // incumbent genome: gene application clamps to the search box, so a
      // detuned start outside it would otherwise be silently flattered.
      std::vector<double> incumbent_obj{state.report.jsd_freq, state.report.jsd_start};
      std::size_t pick = pick_front_point(front, incumbent_obj, nullptr, 1, trace.warnings);
      apply_genes(params, setup.gene_indices, front[pick].genes);
      trace.knee_genes = front[pick].genes;
      trace.knee_objectives = front[pick].objectives;
      trace.front = std::move(front);
      trace.evaluations = cache.misses();
      state = label_corpus(sub, pois, ref, params, workers, true);
    } else {
      trace.knee_genes = setup.incumbent;
      trace.knee_objectives = {state.report.jsd_freq, state.report.jsd_start};
    }
    trace.report = state.report;
    result.phases.push_back(std::move(trace));
  }

  // ---- Phase 2: scoring floors and exponents against (jsd_start, jsd_dur),
  // re-scored from the cached factor inputs. jsd_freq is now frozen; the knee
  // additionally guards it.
  {
    PhaseTrace trace;
    trace.phase = 2;
    PhaseSetup setup = phase_setup(params, 2, settings);
    double frozen_jsd_freq = state.report.jsd_freq;
    if (settings.generations[1] > 0) {
      auto with_genes = [&](std::span<const double> genes) {
        PipelineParams p = params;
        apply_genes(p, setup.gene_indices, genes);
        return p;
      };
      ObjectiveCache cache([&](std::span<const double> genes) {
        LabelHistograms h = scored_histograms(state.caches, ref, with_genes(genes));
        return std::vector<double>{weighted_temporal_jsd(h, ref, TemporalDimension::Start),
                                   weighted_temporal_jsd(h, ref, TemporalDimension::Duration)};
      });
      EvalFn eval = [&cache](std::span<const double> genes) { return cache(genes); };
      std::vector<Individual> front =
          dedupe_front(evolve(setup.bounds, setup.incumbent, eval, phase_seed(2)));
      std::vector<double> incumbent_obj{state.report.jsd_start, state.report.jsd_dur};
      auto freq_guard = [&](std::size_t i) {
        LabelHistograms h = scored_histograms(state.caches, ref, with_genes(front[i].genes));
        return jsd(h.freq, ref.activity_shares.values) <= frozen_jsd_freq + 0.01;
      };
      std::size_t pick = pick_front_point(front, incumbent_obj, freq_guard, 2, trace.warnings);
      apply_genes(params, setup.gene_indices, front[pick].genes);
      trace.knee_genes = front[pick].genes;
      trace.knee_objectives = front[pick].objectives;
      trace.front = std::move(front);
      trace.evaluations = cache.misses();
      rescore_nonmandatory(state, ref, params);
      refresh_report(state, ref, params.hcr_threshold);
    } else {
      trace.knee_genes = setup.incumbent;
      trace.knee_objectives = {state.report.jsd_start, state.report.jsd_dur};
    }
    check_frozen("jsd_freq", frozen_jsd_freq, state.report.jsd_freq, 2, trace.warnings);
    trace.report = state.report;
    result.phases.push_back(std::move(trace));
  }

  // ---- Phase 3: confidence transforms against the negated high-confidence
  // rates. Labels are frozen by construction; the divergences must not move.
  {
    PhaseTrace trace;
    trace.phase = 3;
    PhaseSetup setup = phase_setup(params, 3, settings);
    double frozen_freq = state.report.jsd_freq;
    double frozen_start = state.report.jsd_start;
    double frozen_dur = state.report.jsd_dur;
    if (settings.generations[2] > 0) {
      ObjectiveCache cache([&](std::span<const double> genes) {
        PipelineParams p = params;
        apply_genes(p, setup.gene_indices, genes);
        return std::vector<double>{-cached_hcr_mandatory(state.caches, p),
                                   -cached_hcr_nonmandatory(state.caches, p)};
      });
      EvalFn eval = [&cache](std::span<const double> genes) { return cache(genes); };
      std::vector<Individual> front =
          dedupe_front(evolve(setup.bounds, setup.incumbent, eval, phase_seed(3)));
      std::vector<double> incumbent_obj{-state.report.hcr_mandatory,
                                        -state.report.hcr_nonmandatory};
      std::size_t pick = pick_front_point(front, incumbent_obj, nullptr, 3, trace.warnings);
      apply_genes(params, setup.gene_indices, front[pick].genes);
      trace.knee_genes = front[pick].genes;
      trace.knee_objectives = front[pick].objectives;
      trace.front = std::move(front);
      trace.evaluations = cache.misses();
      apply_confidence_transforms(state, params);
      refresh_report(state, ref, params.hcr_threshold);
    } else {
      trace.knee_genes = setup.incumbent;
      trace.knee_objectives = {-state.report.hcr_mandatory, -state.report.hcr_nonmandatory};
    }
    check_frozen("jsd_freq", frozen_freq, state.report.jsd_freq, 3, trace.warnings);
    check_frozen("jsd_start", frozen_start, state.report.jsd_start, 3, trace.warnings);
    check_frozen("jsd_dur", frozen_dur, state.report.jsd_dur, 3, trace.warnings);
    trace.report = state.report;
    result.phases.push_back(std::move(trace));
  }

  result.params = params;
  // The subsample covered the whole corpus whenever it was small enough, in
  // which case the phase-3 state already is the final full-corpus evaluation.
  if (sub.size() == staypoints.size()) {
    result.final_report = state.report;
  } else {
    result.final_report = label_corpus(staypoints, pois, ref, params, workers, false).report;
  }
  return result;
}

}  // namespace tripurpose
