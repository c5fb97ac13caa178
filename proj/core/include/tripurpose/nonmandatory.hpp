#pragma once

#include <array>
#include <vector>

#include "tripurpose/prob_vector.hpp"
#include "tripurpose/reference_stats.hpp"
#include "tripurpose/staypoint.hpp"

namespace tripurpose {

// Knobs of the multiplicative scorer for the twelve non-mandatory types.
// The duration exponent grows with the duration bin so that short stays,
// whose bin is noisy, lean less on the duration prior.
struct NonMandatoryParams {
  double eps = 1e-4;  // additive floor inside every factor

  double alpha_short = 0.3;  // bins 0-3 (< 1 h)
  double alpha_mid = 0.7;    // bins 4-7 (1-2 h)
  double alpha_long = 1.0;   // bins 8+

  // Duration-prior correction: for the brief activities, delta of the prior
  // mass above the cutoff bin is moved proportionally below it.
  double delta = 0.15;
  int short_bin_cutoff = 4;
  std::vector<Activity> brief_set = {Activity::MealsOut, Activity::Errands, Activity::PickupDrop,
                                     Activity::ShopGoods};

  double alpha_for_bin(std::size_t bin) const {
    if (bin < 4) return alpha_short;
    if (bin < 8) return alpha_mid;
    return alpha_long;
  }

  // Errors on non-positive eps, delta outside [0, 0.3], or a duration
  // exponent schedule that decreases with the bin index.
  void validate() const;
};

// Applies the short-bin mass shift to each brief activity's duration prior;
// all other activities pass through untouched. When nothing lies below the
// cutoff yet, the shifted mass spreads uniformly over the short bins.
std::array<BinHistogram, kActivityCount> correct_duration_prior(
    const std::array<BinHistogram, kActivityCount>& prior, const NonMandatoryParams& params);

struct NonMandatoryScore {
  Activity label = Activity::Caregiving;
  double confidence = 0.0;
  std::array<double, kNonMandatoryCount> posterior{};  // indexed like nonmandatory_activities()
};

// Scores one unlabeled staypoint: for every non-mandatory type the spatial
// likelihood, start-time prior, and (exponent-damped) duration prior are
// multiplied, each floored by eps; the posterior is the normalized score
// vector, the label its argmax (ties to the lowest code), and the confidence
// the posterior maximum. A degenerate or non-finite total falls back to the
// uniform posterior with confidence 1/12.
NonMandatoryScore score_staypoint(const Staypoint& s, const ProbVector& p_space,
                                  const ReferenceStats& ref,
                                  const std::array<BinHistogram, kActivityCount>& corrected_dur,
                                  const NonMandatoryParams& params);

// Same scorer fed by precomputed slot/bin indices; the calibration loop uses
// this to re-score cached staypoints without touching timestamps.
NonMandatoryScore score_from_factors(const ProbVector& p_space, std::size_t start_slot,
                                     std::size_t duration_bin, const ReferenceStats& ref,
                                     const std::array<BinHistogram, kActivityCount>& corrected_dur,
                                     const NonMandatoryParams& params);

}  // namespace tripurpose
