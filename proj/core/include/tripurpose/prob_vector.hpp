#pragma once

#include <array>
#include <cstddef>

#include "tripurpose/activity.hpp"

namespace tripurpose {

inline constexpr double kProbTolerance = 1e-9;

// Distribution over the 15 activity types, indexed by activity code - 1.
// Entries are non-negative; a normalized vector sums to 1 within
// kProbTolerance.
struct ProbVector {
  std::array<double, kActivityCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double& at(Activity a) { return values[index_of(a)]; }
  double at(Activity a) const { return values[index_of(a)]; }

  auto begin() { return values.begin(); }
  auto begin() const { return values.begin(); }
  auto end() { return values.end(); }
  auto end() const { return values.end(); }
  static constexpr std::size_t size() { return kActivityCount; }

  double sum() const;
  bool is_normalized(double tol = kProbTolerance) const;

  bool operator==(const ProbVector&) const = default;
};

// Returns v scaled to sum to 1. Throws Error(DegenerateDistribution) when the
// input is all-zero or contains a non-finite entry.
ProbVector normalize(const ProbVector& v);

ProbVector uniform_prob_vector();

// Unit mass on a single activity.
ProbVector point_mass(Activity a);

}  // namespace tripurpose
