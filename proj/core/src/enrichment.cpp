#include "tripurpose/enrichment.hpp"

#include <initializer_list>
#include <utility>

#include "tripurpose/error.hpp"

namespace tripurpose {
namespace {

using Weights = std::initializer_list<std::pair<Activity, double>>;

ProbVector make_affinity(Weights weights) {
  ProbVector v{};
  for (auto [a, w] : weights) v.at(a) = w;
  return normalize(v);
}

std::map<std::string, ProbVector, std::less<>> build_table() {
  using enum Activity;
  std::map<std::string, ProbVector, std::less<>> t;
  auto add = [&t](std::string_view name, Weights weights) {
    t.emplace(std::string(name), make_affinity(weights));
  };

  add("residential", {{Home, 0.9}, {Social, 0.1}});
  add("apartments", {{Home, 0.9}, {Social, 0.1}});
  add("dormitory", {{Home, 0.7}, {School, 0.2}, {Social, 0.1}});

  add("office", {{Work, 0.85}, {Errands, 0.15}});
  add("company", {{Work, 0.9}, {Errands, 0.1}});
  add("industrial", {{Work, 0.95}, {Other, 0.05}});
  add("coworking_space", {{Work, 0.85}, {Social, 0.15}});
  add("government", {{Work, 0.55}, {Errands, 0.45}});

  add("school", {{School, 0.8}, {PickupDrop, 0.15}, {Work, 0.05}});
  add("university", {{School, 0.8}, {Work, 0.1}, {Social, 0.1}});
  add("college", {{School, 0.85}, {Work, 0.1}, {Social, 0.05}});
  add("kindergarten", {{School, 0.5}, {PickupDrop, 0.35}, {Caregiving, 0.15}});
  add("language_school", {{School, 0.85}, {Leisure, 0.15}});

  add("childcare", {{Caregiving, 0.6}, {PickupDrop, 0.35}, {Work, 0.05}});
  add("nursing_home", {{Caregiving, 0.7}, {Healthcare, 0.2}, {Work, 0.1}});
  add("social_facility", {{Caregiving, 0.6}, {Social, 0.25}, {Errands, 0.15}});

  add("supermarket", {{ShopGoods, 0.9}, {Errands, 0.1}});
  add("convenience", {{ShopGoods, 0.85}, {MealsOut, 0.15}});
  add("department_store", {{ShopGoods, 0.9}, {Leisure, 0.1}});
  add("mall", {{ShopGoods, 0.6}, {MealsOut, 0.2}, {Leisure, 0.2}});
  add("clothes", {{ShopGoods, 0.95}, {Leisure, 0.05}});
  add("electronics", {{ShopGoods, 0.9}, {ShopServices, 0.1}});
  add("furniture", {{ShopGoods, 0.95}, {Leisure, 0.05}});
  add("greengrocer", {{ShopGoods, 0.95}, {MealsOut, 0.05}});
  add("bakery", {{ShopGoods, 0.6}, {MealsOut, 0.4}});
  add("marketplace", {{ShopGoods, 0.7}, {MealsOut, 0.15}, {Social, 0.15}});

  add("hairdresser", {{ShopServices, 0.95}, {Social, 0.05}});
  add("beauty", {{ShopServices, 0.95}, {Leisure, 0.05}});
  add("laundry", {{ShopServices, 0.9}, {Errands, 0.1}});
  add("dry_cleaning", {{ShopServices, 0.85}, {Errands, 0.15}});
  add("car_repair", {{ShopServices, 0.8}, {Errands, 0.2}});
  add("car_wash", {{ShopServices, 0.75}, {Errands, 0.25}});
  add("tailor", {{ShopServices, 0.9}, {ShopGoods, 0.1}});

  add("restaurant", {{MealsOut, 0.85}, {Social, 0.15}});
  add("fast_food", {{MealsOut, 0.95}, {Errands, 0.05}});
  add("cafe", {{MealsOut, 0.65}, {Social, 0.25}, {Work, 0.1}});
  add("food_court", {{MealsOut, 0.9}, {ShopGoods, 0.1}});
  add("ice_cream", {{MealsOut, 0.8}, {Leisure, 0.2}});
  add("pub", {{MealsOut, 0.5}, {Social, 0.45}, {Leisure, 0.05}});

  add("bank", {{Errands, 0.9}, {Work, 0.1}});
  add("post_office", {{Errands, 0.95}, {ShopGoods, 0.05}});
  add("atm", {{Errands, 1.0}});
  add("townhall", {{Errands, 0.7}, {Work, 0.3}});
  add("courthouse", {{Errands, 0.7}, {Work, 0.3}});
  add("fuel", {{Errands, 0.85}, {ShopGoods, 0.15}});
  add("veterinary", {{Errands, 0.6}, {Healthcare, 0.25}, {Other, 0.15}});

  add("park", {{Leisure, 0.6}, {Exercise, 0.3}, {Social, 0.1}});
  add("cinema", {{Leisure, 0.9}, {Social, 0.1}});
  add("theatre", {{Leisure, 0.85}, {Social, 0.15}});
  add("museum", {{Leisure, 0.9}, {School, 0.1}});
  add("library", {{Leisure, 0.55}, {School, 0.3}, {Work, 0.15}});
  add("attraction", {{Leisure, 0.9}, {Social, 0.1}});
  add("playground", {{Leisure, 0.5}, {Caregiving, 0.3}, {PickupDrop, 0.2}});
  add("beach", {{Leisure, 0.7}, {Exercise, 0.2}, {Social, 0.1}});

  add("gym", {{Exercise, 0.95}, {Social, 0.05}});
  add("fitness_centre", {{Exercise, 0.95}, {Social, 0.05}});
  add("sports_centre", {{Exercise, 0.85}, {Leisure, 0.1}, {Social, 0.05}});
  add("swimming_pool", {{Exercise, 0.85}, {Leisure, 0.15}});
  add("pitch", {{Exercise, 0.8}, {Leisure, 0.2}});
  add("stadium", {{Leisure, 0.65}, {Exercise, 0.25}, {Social, 0.1}});

  add("bar", {{Social, 0.6}, {MealsOut, 0.3}, {Leisure, 0.1}});
  add("nightclub", {{Social, 0.85}, {Leisure, 0.15}});
  add("community_centre", {{Social, 0.6}, {Leisure, 0.2}, {Worship, 0.2}});
  add("events_venue", {{Social, 0.7}, {Leisure, 0.3}});

  add("hospital", {{Healthcare, 0.85}, {Work, 0.1}, {Caregiving, 0.05}});
  add("clinic", {{Healthcare, 0.95}, {Errands, 0.05}});
  add("doctors", {{Healthcare, 0.95}, {Errands, 0.05}});
  add("dentist", {{Healthcare, 0.95}, {Errands, 0.05}});
  add("pharmacy", {{Healthcare, 0.55}, {ShopGoods, 0.35}, {Errands, 0.1}});

  add("place_of_worship", {{Worship, 0.9}, {Social, 0.1}});
  add("church", {{Worship, 0.9}, {Social, 0.1}});
  add("mosque", {{Worship, 0.9}, {Social, 0.1}});
  add("synagogue", {{Worship, 0.9}, {Social, 0.1}});
  add("temple", {{Worship, 0.85}, {Leisure, 0.15}});

  add("hotel", {{Other, 0.7}, {Social, 0.2}, {MealsOut, 0.1}});
  add("parking", {{Other, 0.7}, {PickupDrop, 0.3}});
  add("airport", {{Other, 0.6}, {PickupDrop, 0.3}, {Work, 0.1}});
  add("construction", {{Other, 0.6}, {Work, 0.4}});
  add("storage_rental", {{Other, 0.7}, {Errands, 0.3}});

  add("bus_station", {{PickupDrop, 0.7}, {Other, 0.3}});
  add("train_station", {{PickupDrop, 0.6}, {Other, 0.3}, {Work, 0.1}});
  add("ferry_terminal", {{PickupDrop, 0.6}, {Other, 0.4}});
  add("kiss_and_ride", {{PickupDrop, 0.95}, {Other, 0.05}});

  return t;
}

}  // namespace

const std::map<std::string, ProbVector, std::less<>>& builtin_category_table() {
  static const auto table = build_table();
  return table;
}

const ProbVector* category_affinity(std::string_view category) {
  const auto& table = builtin_category_table();
  auto it = table.find(category);
  return it == table.end() ? nullptr : &it->second;
}

std::vector<std::string_view> categories_for(Activity a) {
  std::vector<std::string_view> out;
  for (const auto& [name, dist] : builtin_category_table()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kActivityCount; ++i) {
      if (dist[i] > dist[best]) best = i;
    }
    if (best == static_cast<std::size_t>(index_of(a))) out.push_back(name);
  }
  if (out.empty()) fail(ErrorKind::Config, "no category mapped to " + std::string(activity_name(a)));
  return out;
}

}  // namespace tripurpose
