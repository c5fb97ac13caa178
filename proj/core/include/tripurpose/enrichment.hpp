#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tripurpose/activity.hpp"
#include "tripurpose/prob_vector.hpp"

namespace tripurpose {

// Built-in mapping from OSM-style place categories to activity affinity
// vectors. POIs that already carry an explicit distribution bypass the table,
// and callers may extend or replace it with offline-enriched entries.
const std::map<std::string, ProbVector, std::less<>>& builtin_category_table();

// Affinity vector for one category tag, or nullptr when the tag is unknown.
const ProbVector* category_affinity(std::string_view category);

// Category tags whose affinity puts the most weight on `a`; never empty.
std::vector<std::string_view> categories_for(Activity a);

}  // namespace tripurpose
