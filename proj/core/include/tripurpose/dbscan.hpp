#pragma once

#include <span>
#include <vector>

#include "tripurpose/geo.hpp"

namespace tripurpose {

// Density clustering over geographic points with the haversine metric. A
// point is core when at least min_pts points (itself included) lie within
// eps_m; non-core points reachable from a core point join its cluster, and
// anything left over becomes a singleton cluster, so the labels always
// partition the input. Ids are dense and numbered by first appearance, which
// makes the labeling canonical and directly comparable between runs.
std::vector<int> dbscan_labels(std::span<const LatLon> points, double eps_m, std::size_t min_pts);

// Same contract with O(n^2) pairwise neighbor search; kept as a verification
// reference for the grid-accelerated version.
std::vector<int> dbscan_labels_bruteforce(std::span<const LatLon> points, double eps_m,
                                          std::size_t min_pts);

}  // namespace tripurpose
