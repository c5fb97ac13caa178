#include "tripurpose/dbscan.hpp"

#include <cstdint>

#include "tripurpose/geo_grid.hpp"

namespace tripurpose {
namespace {

constexpr int kUnset = -1;

// Shared expansion over precomputed core flags and a neighbor callback.
// Clusters are grown one seed at a time in index order, so contested border
// points always go to the earlier-seeded cluster.
template <typename NeighborsFn>
std::vector<int> expand_clusters(std::size_t n, const std::vector<bool>& core,
                                 NeighborsFn&& neighbors_of) {
  std::vector<int> labels(n, kUnset);
  std::vector<std::uint32_t> queue;
  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnset || !core[i]) continue;
    int cluster = next_cluster++;
    labels[i] = cluster;
    queue.assign(1, static_cast<std::uint32_t>(i));
    while (!queue.empty()) {
      std::uint32_t q = queue.back();
      queue.pop_back();
      for (std::uint32_t nb : neighbors_of(q)) {
        if (labels[nb] != kUnset) continue;
        labels[nb] = cluster;
        if (core[nb]) queue.push_back(nb);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == kUnset) labels[i] = next_cluster++;
  }

  // Renumber so ids follow first appearance regardless of expansion order.
  std::vector<int> remap(static_cast<std::size_t>(next_cluster), kUnset);
  int dense = 0;
  for (auto& label : labels) {
    if (remap[static_cast<std::size_t>(label)] == kUnset) {
      remap[static_cast<std::size_t>(label)] = dense++;
    }
    label = remap[static_cast<std::size_t>(label)];
  }
  return labels;
}

}  // namespace

std::vector<int> dbscan_labels(std::span<const LatLon> points, double eps_m, std::size_t min_pts) {
  std::size_t n = points.size();
  if (n == 0) return {};
  GeoGrid grid(points, eps_m);

  auto neighbors_of = [&](std::uint32_t i) {
    std::vector<std::uint32_t> nbs;
    grid.for_candidates(points[i], [&](std::uint32_t j) {
      if (haversine_m(points[i], points[j]) <= eps_m) nbs.push_back(j);
    });
    return nbs;
  };

  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    grid.for_candidates(points[i], [&](std::uint32_t j) {
      if (haversine_m(points[i], points[j]) <= eps_m) ++count;
    });
    core[i] = count >= min_pts;
  }
  return expand_clusters(n, core, neighbors_of);
}

std::vector<int> dbscan_labels_bruteforce(std::span<const LatLon> points, double eps_m,
                                          std::size_t min_pts) {
  std::size_t n = points.size();
  if (n == 0) return {};

  std::vector<std::vector<std::uint32_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (haversine_m(points[i], points[j]) <= eps_m) {
        neighbors[i].push_back(static_cast<std::uint32_t>(j));
      }
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = neighbors[i].size() >= min_pts;
  return expand_clusters(n, core, [&](std::uint32_t i) -> const std::vector<std::uint32_t>& {
    return neighbors[i];
  });
}

}  // namespace tripurpose
