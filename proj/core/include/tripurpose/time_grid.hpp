#pragma once

#include <cstdint>

namespace tripurpose {

using Instant = std::int64_t;  // UTC seconds since the Unix epoch

inline constexpr int kSlotsPerDay = 96;
inline constexpr int kSlotSeconds = 15 * 60;
inline constexpr int kDurationBins = 96;
inline constexpr std::int64_t kSecondsPerDay = 86400;

inline constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

inline constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

// Local wall-clock seconds for a fixed UTC offset in minutes. The study
// region is a single metro area, so one offset covers the corpus and DST is
// ignored.
inline constexpr std::int64_t to_local_seconds(Instant t, int tz_offset_min) {
  return t + std::int64_t{tz_offset_min} * 60;
}

// 15-minute time-of-day slot in [0, 95]; local midnight maps to 0.
inline constexpr int slot_of(Instant t, int tz_offset_min) {
  return static_cast<int>(floor_mod(to_local_seconds(t, tz_offset_min), kSecondsPerDay) /
                          kSlotSeconds);
}

// 15-minute duration bin, overflow-clamped at 24 h (bin 95).
inline constexpr int duration_bin(std::int64_t duration_seconds) {
  std::int64_t minutes = duration_seconds / 60;
  std::int64_t bin = minutes / 15;
  return bin > kDurationBins - 1 ? kDurationBins - 1 : static_cast<int>(bin);
}

// Local calendar day as days since the epoch.
inline constexpr std::int64_t local_day(Instant t, int tz_offset_min) {
  return floor_div(to_local_seconds(t, tz_offset_min), kSecondsPerDay);
}

// 0 = Monday .. 6 = Sunday. Day 0 (1970-01-01) was a Thursday.
inline constexpr int weekday_of(std::int64_t day) {
  return static_cast<int>(floor_mod(day + 3, 7));
}

inline constexpr bool is_weekend_day(std::int64_t day) { return weekday_of(day) >= 5; }

// Visits each 15-minute slot overlapped by [t_start, t_end), calling
// fn(local_day, slot, overlap_fraction) with the fraction of the slot
// covered. Used to integrate a per-slot prior over a stay interval.
template <typename Fn>
void for_each_slot_overlap(Instant t_start, Instant t_end, int tz_offset_min, Fn&& fn) {
  if (t_end <= t_start) return;
  std::int64_t lo = to_local_seconds(t_start, tz_offset_min);
  std::int64_t hi = to_local_seconds(t_end, tz_offset_min);
  std::int64_t first = floor_div(lo, kSlotSeconds);
  std::int64_t last = floor_div(hi - 1, kSlotSeconds);
  for (std::int64_t cell = first; cell <= last; ++cell) {
    std::int64_t cell_start = cell * kSlotSeconds;
    std::int64_t cell_end = cell_start + kSlotSeconds;
    std::int64_t ov_lo = lo > cell_start ? lo : cell_start;
    std::int64_t ov_hi = hi < cell_end ? hi : cell_end;
    double frac = static_cast<double>(ov_hi - ov_lo) / kSlotSeconds;
    std::int64_t day = floor_div(cell_start, kSecondsPerDay);
    int slot = static_cast<int>(cell - day * (kSecondsPerDay / kSlotSeconds));
    fn(day, slot, frac);
  }
}

}  // namespace tripurpose
