#include "tripurpose/prob_vector.hpp"

#include <cmath>

#include "tripurpose/error.hpp"

namespace tripurpose {

double ProbVector::sum() const {
  double total = 0.0;
  for (double x : values) total += x;
  return total;
}

bool ProbVector::is_normalized(double tol) const {
  return std::abs(sum() - 1.0) <= tol;
}

ProbVector normalize(const ProbVector& v) {
  double total = 0.0;
  for (double x : v.values) {
    if (!std::isfinite(x) || x < 0.0) {
      fail(ErrorKind::DegenerateDistribution,
           "probability vector has a negative or non-finite entry");
    }
    total += x;
  }
  if (total <= 0.0) {
    fail(ErrorKind::DegenerateDistribution, "probability vector sums to zero");
  }
  ProbVector out;
  for (std::size_t i = 0; i < kActivityCount; ++i) out.values[i] = v.values[i] / total;
  return out;
}

ProbVector uniform_prob_vector() {
  ProbVector out;
  out.values.fill(1.0 / kActivityCount);
  return out;
}

ProbVector point_mass(Activity a) {
  ProbVector out;
  out.at(a) = 1.0;
  return out;
}

}  // namespace tripurpose
