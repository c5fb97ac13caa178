#include "tripurpose/metrics.hpp"

#include <cmath>
#include <vector>

#include "tripurpose/error.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {
namespace {

double normalized_copy(std::span<const double> in, std::vector<double>& out) {
  double total = 0.0;
  for (double v : in) {
    if (v < 0.0 || !std::isfinite(v)) {
      fail(ErrorKind::DegenerateDistribution, "histogram entries must be finite and non-negative");
    }
    total += v;
  }
  if (total <= 0.0) fail(ErrorKind::DegenerateDistribution, "histogram has no mass");
  out.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / total;
  return total;
}

bool has_mass(std::span<const double> h) {
  for (double v : h) {
    if (v > 0.0) return true;
  }
  return false;
}

}  // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    fail(ErrorKind::Schema, "divergence inputs differ in length: " + std::to_string(p.size()) +
                                " vs " + std::to_string(q.size()));
  }
  static thread_local std::vector<double> pn, qn;
  normalized_copy(p, pn);
  normalized_copy(q, qn);

  double div = 0.0;
  for (std::size_t i = 0; i < pn.size(); ++i) {
    double m = 0.5 * (pn[i] + qn[i]);
    if (pn[i] > 0.0) div += 0.5 * pn[i] * std::log2(pn[i] / m);
    if (qn[i] > 0.0) div += 0.5 * qn[i] * std::log2(qn[i] / m);
  }
  return std::max(0.0, div);
}

double weighted_temporal_jsd(const LabelHistograms& inferred, const ReferenceStats& ref,
                             TemporalDimension dimension) {
  double weight_total = 0.0;
  double acc = 0.0;
  for (Activity a : all_activities()) {
    std::size_t i = index_of(a);
    double share = ref.activity_shares[i];
    if (share <= 0.0) continue;
    bool start = dimension == TemporalDimension::Start;
    if (start ? ref.start_absent[i] : ref.duration_absent[i]) continue;
    weight_total += share;

    std::span<const double> inf =
        start ? std::span<const double>(inferred.start[i]) : std::span<const double>(inferred.duration[i]);
    std::span<const double> prior =
        start ? std::span<const double>(ref.start_time_prior[i])
              : std::span<const double>(ref.duration_prior[i]);
    acc += share * (has_mass(inf) ? jsd(inf, prior) : 1.0);
  }
  if (weight_total <= 0.0) {
    fail(ErrorKind::DegenerateDistribution, "reference shares leave no activity to compare");
  }
  return acc / weight_total;
}

double hcr(const StaypointCorpus& corpus, double tau_c, ActivityClass filter, bool* empty) {
  std::size_t total = 0;
  std::size_t high = 0;
  for (const auto& agent : corpus) {
    for (const auto& sp : agent.points) {
      if (!sp.labeled()) {
        fail(ErrorKind::IncompleteInference,
             "unlabeled staypoint in agent " + agent.agent_id + " during confidence-rate scan");
      }
      if (class_of(*sp.label) != filter) continue;
      ++total;
      if (*sp.confidence >= tau_c) ++high;
    }
  }
  if (empty) *empty = total == 0;
  if (total == 0) return 0.0;
  return static_cast<double>(high) / static_cast<double>(total);
}

LabelHistograms accumulate_histograms(const StaypointCorpus& corpus, int timezone_offset_min) {
  LabelHistograms h;
  for (const auto& agent : corpus) {
    for (const auto& sp : agent.points) {
      if (!sp.labeled()) {
        fail(ErrorKind::IncompleteInference,
             "unlabeled staypoint in agent " + agent.agent_id + " during histogram accumulation");
      }
      std::size_t a = index_of(*sp.label);
      h.freq[a] += 1.0;
      h.start[a][slot_of(sp.t_start, timezone_offset_min)] += 1.0;
      h.duration[a][duration_bin(sp.duration_s())] += 1.0;
      ++h.total;
    }
  }
  return h;
}

EvalReport build_report(const StaypointCorpus& corpus, const ReferenceStats& ref, double tau_c) {
  LabelHistograms h = accumulate_histograms(corpus, ref.timezone_offset_min);
  if (h.total == 0) fail(ErrorKind::EmptyCorpus, "no staypoints to evaluate");

  EvalReport report;
  report.staypoint_count = h.total;
  report.jsd_freq = jsd(h.freq, ref.activity_shares.values);
  report.jsd_start = weighted_temporal_jsd(h, ref, TemporalDimension::Start);
  report.jsd_dur = weighted_temporal_jsd(h, ref, TemporalDimension::Duration);
  report.hcr_mandatory = hcr(corpus, tau_c, ActivityClass::Mandatory, &report.hcr_mandatory_empty);
  report.hcr_nonmandatory =
      hcr(corpus, tau_c, ActivityClass::NonMandatory, &report.hcr_nonmandatory_empty);
  return report;
}

}  // namespace tripurpose
