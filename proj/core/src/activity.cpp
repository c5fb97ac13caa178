#include "tripurpose/activity.hpp"

#include "tripurpose/error.hpp"

namespace tripurpose {
namespace {

constexpr std::array<Activity, kActivityCount> kAll = {
    Activity::Home,       Activity::Work,       Activity::School,
    Activity::Caregiving, Activity::ShopGoods,  Activity::ShopServices,
    Activity::MealsOut,   Activity::Errands,    Activity::Leisure,
    Activity::Exercise,   Activity::Social,     Activity::Healthcare,
    Activity::Worship,    Activity::Other,      Activity::PickupDrop,
};

constexpr std::array<std::string_view, kActivityCount> kNames = {
    "Home",        "Work",          "School",   "Caregiving", "Shop Goods",
    "Shop Services", "Meals Out",   "Errands",  "Leisure",    "Exercise",
    "Social",      "Healthcare",    "Worship",  "Other",      "Pickup/Drop",
};

}  // namespace

Activity activity_from_code(int code) {
  if (!is_valid_code(code)) {
    fail(ErrorKind::Schema, "activity code out of range: " + std::to_string(code));
  }
  return static_cast<Activity>(code);
}

std::string_view activity_name(Activity a) { return kNames[index_of(a)]; }

std::span<const Activity> all_activities() { return kAll; }

std::span<const Activity> mandatory_activities() {
  return std::span<const Activity>(kAll.data(), kMandatoryCount);
}

std::span<const Activity> nonmandatory_activities() {
  return std::span<const Activity>(kAll.data() + kMandatoryCount, kNonMandatoryCount);
}

}  // namespace tripurpose
