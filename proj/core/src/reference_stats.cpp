#include "tripurpose/reference_stats.hpp"

#include <cmath>
#include <initializer_list>

namespace tripurpose {
namespace {

struct Bump {
  double center_h;
  double sigma_h;
  double weight;
};

// Evaluates a mixture of Gaussian bumps (hours) plus a flat floor at the
// centers of a 15-minute grid and normalizes.
template <std::size_t N>
std::array<double, N> bump_histogram(std::initializer_list<Bump> bumps, double floor) {
  std::array<double, N> h{};
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double x = (static_cast<double>(i) + 0.5) * 0.25;
    double y = floor / N;
    for (const Bump& b : bumps) {
      double z = (x - b.center_h) / b.sigma_h;
      y += b.weight * std::exp(-0.5 * z * z) / b.sigma_h;
    }
    h[i] = y;
    total += y;
  }
  for (auto& y : h) y /= total;
  return h;
}

}  // namespace

ReferenceStats default_reference_stats(int timezone_offset_min) {
  ReferenceStats ref;
  ref.timezone_offset_min = timezone_offset_min;

  ProbVector shares;
  shares.at(Activity::Home) = 0.300;
  shares.at(Activity::Work) = 0.170;
  shares.at(Activity::School) = 0.045;
  shares.at(Activity::Caregiving) = 0.015;
  shares.at(Activity::ShopGoods) = 0.080;
  shares.at(Activity::ShopServices) = 0.030;
  shares.at(Activity::MealsOut) = 0.090;
  shares.at(Activity::Errands) = 0.055;
  shares.at(Activity::Leisure) = 0.065;
  shares.at(Activity::Exercise) = 0.035;
  shares.at(Activity::Social) = 0.050;
  shares.at(Activity::Healthcare) = 0.022;
  shares.at(Activity::Worship) = 0.013;
  shares.at(Activity::Other) = 0.030;
  shares.at(Activity::PickupDrop) = 0.060;
  ref.activity_shares = normalize(shares);

  auto& start = ref.start_time_prior;
  start[index_of(Activity::Home)] =
      bump_histogram<kSlotsPerDay>({{17.5, 2.0, 0.60}, {13.0, 3.0, 0.30}}, 0.10);
  start[index_of(Activity::Work)] =
      bump_histogram<kSlotsPerDay>({{7.8, 1.2, 0.75}, {13.0, 1.3, 0.25}}, 0.0);
  start[index_of(Activity::School)] = bump_histogram<kSlotsPerDay>({{7.7, 0.7, 1.0}}, 0.0);
  start[index_of(Activity::Caregiving)] =
      bump_histogram<kSlotsPerDay>({{9.0, 2.5, 0.50}, {15.5, 2.5, 0.45}}, 0.05);
  start[index_of(Activity::ShopGoods)] =
      bump_histogram<kSlotsPerDay>({{11.0, 2.0, 0.35}, {14.5, 2.5, 0.40}, {18.0, 1.5, 0.20}}, 0.05);
  start[index_of(Activity::ShopServices)] =
      bump_histogram<kSlotsPerDay>({{10.5, 2.0, 0.50}, {15.0, 2.5, 0.45}}, 0.05);
  start[index_of(Activity::MealsOut)] =
      bump_histogram<kSlotsPerDay>({{12.2, 0.9, 0.40}, {18.7, 1.3, 0.45}, {8.0, 1.0, 0.12}}, 0.03);
  start[index_of(Activity::Errands)] =
      bump_histogram<kSlotsPerDay>({{10.5, 2.2, 0.55}, {15.0, 2.5, 0.40}}, 0.05);
  start[index_of(Activity::Leisure)] =
      bump_histogram<kSlotsPerDay>({{14.0, 3.0, 0.40}, {19.0, 1.8, 0.50}}, 0.10);
  start[index_of(Activity::Exercise)] =
      bump_histogram<kSlotsPerDay>({{6.8, 1.0, 0.35}, {17.8, 1.8, 0.55}}, 0.10);
  start[index_of(Activity::Social)] =
      bump_histogram<kSlotsPerDay>({{15.0, 3.0, 0.35}, {19.5, 2.0, 0.55}}, 0.10);
  start[index_of(Activity::Healthcare)] =
      bump_histogram<kSlotsPerDay>({{10.0, 1.8, 0.60}, {14.5, 2.0, 0.38}}, 0.02);
  start[index_of(Activity::Worship)] =
      bump_histogram<kSlotsPerDay>({{9.5, 1.5, 0.55}, {18.5, 2.0, 0.40}}, 0.05);
  start[index_of(Activity::Other)] = bump_histogram<kSlotsPerDay>({{13.0, 4.5, 0.90}}, 0.10);
  start[index_of(Activity::PickupDrop)] =
      bump_histogram<kSlotsPerDay>({{7.9, 0.9, 0.40}, {15.3, 1.1, 0.40}, {12.0, 3.0, 0.17}}, 0.03);

  auto& dur = ref.duration_prior;
  dur[index_of(Activity::Home)] =
      bump_histogram<kDurationBins>({{12.5, 2.2, 0.60}, {3.0, 1.5, 0.35}}, 0.05);
  dur[index_of(Activity::Work)] =
      bump_histogram<kDurationBins>({{8.3, 1.2, 0.85}, {4.5, 1.0, 0.15}}, 0.0);
  dur[index_of(Activity::School)] = bump_histogram<kDurationBins>({{6.6, 0.8, 1.0}}, 0.0);
  dur[index_of(Activity::Caregiving)] =
      bump_histogram<kDurationBins>({{1.5, 0.8, 0.70}, {4.0, 1.5, 0.29}}, 0.01);
  dur[index_of(Activity::ShopGoods)] =
      bump_histogram<kDurationBins>({{0.7, 0.35, 0.75}, {1.8, 0.7, 0.24}}, 0.01);
  dur[index_of(Activity::ShopServices)] =
      bump_histogram<kDurationBins>({{0.9, 0.4, 0.80}, {2.0, 0.8, 0.19}}, 0.01);
  dur[index_of(Activity::MealsOut)] =
      bump_histogram<kDurationBins>({{1.1, 0.4, 0.85}, {2.2, 0.7, 0.14}}, 0.01);
  dur[index_of(Activity::Errands)] =
      bump_histogram<kDurationBins>({{0.5, 0.25, 0.80}, {1.5, 0.5, 0.19}}, 0.01);
  dur[index_of(Activity::Leisure)] =
      bump_histogram<kDurationBins>({{2.2, 1.0, 0.75}, {4.5, 1.5, 0.24}}, 0.01);
  dur[index_of(Activity::Exercise)] =
      bump_histogram<kDurationBins>({{1.3, 0.5, 0.90}, {2.5, 0.8, 0.09}}, 0.01);
  dur[index_of(Activity::Social)] =
      bump_histogram<kDurationBins>({{2.5, 1.2, 0.80}, {5.0, 1.5, 0.19}}, 0.01);
  dur[index_of(Activity::Healthcare)] =
      bump_histogram<kDurationBins>({{1.2, 0.5, 0.80}, {3.0, 1.0, 0.19}}, 0.01);
  dur[index_of(Activity::Worship)] =
      bump_histogram<kDurationBins>({{1.6, 0.5, 0.90}, {3.0, 1.0, 0.09}}, 0.01);
  dur[index_of(Activity::Other)] =
      bump_histogram<kDurationBins>({{1.5, 1.2, 0.80}, {5.0, 2.0, 0.15}}, 0.05);
  dur[index_of(Activity::PickupDrop)] =
      bump_histogram<kDurationBins>({{0.22, 0.12, 0.90}, {0.8, 0.3, 0.10}}, 0.01);

  return ref;
}

}  // namespace tripurpose
