#include "tripurpose/nonmandatory.hpp"

#include <cmath>

#include "tripurpose/error.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {

void NonMandatoryParams::validate() const {
  if (!(eps > 0.0)) fail(ErrorKind::Config, "score floor eps must be positive");
  if (!(delta >= 0.0 && delta <= 0.3)) {
    fail(ErrorKind::Config, "duration mass shift delta must lie in [0, 0.3]");
  }
  if (!(alpha_short > 0.0 && alpha_short <= 1.0) || !(alpha_mid > 0.0 && alpha_mid <= 1.0) ||
      !(alpha_long > 0.0 && alpha_long <= 1.0)) {
    fail(ErrorKind::Config, "duration exponents must lie in (0, 1]");
  }
  if (alpha_short > alpha_mid || alpha_mid > alpha_long) {
    fail(ErrorKind::Config, "duration exponent schedule must be non-decreasing");
  }
  for (Activity a : brief_set) {
    if (class_of(a) != ActivityClass::NonMandatory) {
      fail(ErrorKind::Config,
           "brief activity set may only contain non-mandatory types, got " +
               std::string(activity_name(a)));
    }
  }
}

std::array<BinHistogram, kActivityCount> correct_duration_prior(
    const std::array<BinHistogram, kActivityCount>& prior, const NonMandatoryParams& params) {
  std::array<BinHistogram, kActivityCount> out = prior;
  auto cutoff = static_cast<std::size_t>(std::max(params.short_bin_cutoff, 0));
  if (params.delta <= 0.0 || cutoff == 0 || cutoff >= kDurationBins) return out;

  for (Activity a : params.brief_set) {
    BinHistogram& h = out[index_of(a)];
    double mass_hi = 0.0;
    double mass_lo = 0.0;
    for (std::size_t b = 0; b < kDurationBins; ++b) (b < cutoff ? mass_lo : mass_hi) += h[b];
    double shift = std::min(params.delta, mass_hi);
    if (shift <= 0.0) continue;

    double hi_scale = (mass_hi - shift) / mass_hi;
    for (std::size_t b = cutoff; b < kDurationBins; ++b) h[b] *= hi_scale;
    if (mass_lo > 0.0) {
      double lo_scale = (mass_lo + shift) / mass_lo;
      for (std::size_t b = 0; b < cutoff; ++b) h[b] *= lo_scale;
    } else {
      double even = shift / static_cast<double>(cutoff);
      for (std::size_t b = 0; b < cutoff; ++b) h[b] = even;
    }

    double total = mass_lo + mass_hi;  // defensively renormalize
    if (total > 0.0) {
      for (double& v : h) v /= total;
    }
  }
  return out;
}

NonMandatoryScore score_from_factors(const ProbVector& p_space, std::size_t start_slot,
                                     std::size_t duration_bin, const ReferenceStats& ref,
                                     const std::array<BinHistogram, kActivityCount>& corrected_dur,
                                     const NonMandatoryParams& params) {
  NonMandatoryScore out;
  double alpha = params.alpha_for_bin(duration_bin);
  double total = 0.0;
  for (std::size_t k = 0; k < kNonMandatoryCount; ++k) {
    Activity a = nonmandatory_activities()[k];
    double space = p_space.at(a) + params.eps;
    double tod = ref.start_prior(a)[start_slot] + params.eps;
    double dur = std::pow(corrected_dur[index_of(a)][duration_bin] + params.eps, alpha);
    out.posterior[k] = space * tod * dur;
    total += out.posterior[k];
  }

  if (!(total > 0.0) || !std::isfinite(total)) {
    out.posterior.fill(1.0 / kNonMandatoryCount);
    out.label = nonmandatory_activities()[0];
    out.confidence = 1.0 / kNonMandatoryCount;
    return out;
  }

  std::size_t best = 0;
  for (std::size_t k = 0; k < kNonMandatoryCount; ++k) {
    out.posterior[k] /= total;
    if (out.posterior[k] > out.posterior[best]) best = k;
  }
  out.label = nonmandatory_activities()[best];
  out.confidence = out.posterior[best];
  return out;
}

NonMandatoryScore score_staypoint(const Staypoint& s, const ProbVector& p_space,
                                  const ReferenceStats& ref,
                                  const std::array<BinHistogram, kActivityCount>& corrected_dur,
                                  const NonMandatoryParams& params) {
  std::size_t slot = slot_of(s.t_start, ref.timezone_offset_min);
  std::size_t bin = duration_bin(s.duration_s());
  return score_from_factors(p_space, slot, bin, ref, corrected_dur, params);
}

}  // namespace tripurpose
