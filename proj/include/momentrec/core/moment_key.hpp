#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "momentrec/core/records.hpp"

namespace momentrec {

inline constexpr int kMaxTzOffsetMinutes = 840;

// A Year-Month-Day-Hour interval. Text form is "YYYY-MM-DDTHH".
struct MomentKey {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;

  // Throws ValidationError on an invalid calendar date or hour.
  static MomentKey make(int year, int month, int day, int hour);
  static MomentKey parse(std::string_view text);

  std::string to_string() const;

  auto operator<=>(const MomentKey&) const = default;
};

// Calendar hour containing `instant` shifted by `tz_offset_minutes`.
MomentKey moment_key_of(Instant instant, int tz_offset_minutes = 0);

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM", "YYYY-MM-DDTHH:MM:SS" with an
// optional trailing 'Z'. Always UTC.
Instant parse_iso_instant(std::string_view text);

std::string format_iso_instant(Instant instant);

}  // namespace momentrec
