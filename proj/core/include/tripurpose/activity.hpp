#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace tripurpose {

inline constexpr int kActivityCount = 15;
inline constexpr int kMandatoryCount = 3;
inline constexpr int kNonMandatoryCount = kActivityCount - kMandatoryCount;

enum class ActivityClass : std::uint8_t { Mandatory, NonMandatory };

// Activity codes are 1-based and dense. Home/Work/School are the recurrent
// anchors handled by bidding; the remaining twelve go through probabilistic
// scoring.
enum class Activity : std::uint8_t {
  Home = 1,
  Work = 2,
  School = 3,
  Caregiving = 4,
  ShopGoods = 5,
  ShopServices = 6,
  MealsOut = 7,
  Errands = 8,
  Leisure = 9,
  Exercise = 10,
  Social = 11,
  Healthcare = 12,
  Worship = 13,
  Other = 14,
  PickupDrop = 15,
};

constexpr int code_of(Activity a) { return static_cast<int>(a); }
constexpr int index_of(Activity a) { return static_cast<int>(a) - 1; }

constexpr bool is_valid_code(int code) { return code >= 1 && code <= kActivityCount; }

// Throws Error(Schema) on an out-of-range code.
Activity activity_from_code(int code);

constexpr ActivityClass class_of(Activity a) {
  return code_of(a) <= kMandatoryCount ? ActivityClass::Mandatory
                                       : ActivityClass::NonMandatory;
}

std::string_view activity_name(Activity a);

std::span<const Activity> all_activities();
std::span<const Activity> mandatory_activities();
std::span<const Activity> nonmandatory_activities();

}  // namespace tripurpose
