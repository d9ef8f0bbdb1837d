#include "momentrec/core/moment_key.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "momentrec/core/error.hpp"

namespace momentrec {
namespace {

using namespace std::chrono;

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

MomentKey MomentKey::make(int year, int month, int day, int hour) {
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (year < 0 || year > 9999 || month < 1 || month > 12 || day < 1 || !ymd.ok()) {
    throw ValidationError("invalid calendar date in moment key");
  }
  if (hour < 0 || hour > 23) throw ValidationError("moment hour out of range 0..23");
  return MomentKey{year, month, day, hour};
}

MomentKey MomentKey::parse(std::string_view text) {
  // YYYY-MM-DDTHH
  if (text.size() != 13 || text[4] != '-' || text[7] != '-' || text[10] != 'T') {
    throw ValidationError("malformed moment key: '" + std::string(text) + "'");
  }
  int y = 0, m = 0, d = 0, h = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h)) {
    throw ValidationError("malformed moment key: '" + std::string(text) + "'");
  }
  return make(y, m, d, h);
}

std::string MomentKey::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d", year, month, day, hour);
  return buf;
}

MomentKey moment_key_of(Instant instant, int tz_offset_minutes) {
  if (tz_offset_minutes < -kMaxTzOffsetMinutes || tz_offset_minutes > kMaxTzOffsetMinutes) {
    throw ValidationError("timezone offset out of range");
  }
  const auto local = instant + minutes{tz_offset_minutes};
  const auto day_start = floor<days>(local);
  const year_month_day ymd{day_start};
  const auto hour = duration_cast<hours>(local - day_start).count();
  return MomentKey{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
                   static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(hour)};
}

Instant parse_iso_instant(std::string_view text) {
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) text.remove_suffix(1);
  const auto fail = [&] { return ValidationError("malformed ISO instant: '" + std::string(text) + "'"); };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw fail();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d)) {
    throw fail();
  }
  if (text.size() > 10) {
    if (text[10] != 'T' && text[10] != ' ') throw fail();
    if (text.size() < 16 || text[13] != ':' || !parse_int(text.substr(11, 2), h) ||
        !parse_int(text.substr(14, 2), mi)) {
      throw fail();
    }
    if (text.size() > 16) {
      if (text.size() != 19 || text[16] != ':' || !parse_int(text.substr(17, 2), s)) throw fail();
    }
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw fail();
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_iso_instant(Instant instant) {
  const auto day_start = floor<days>(instant);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{instant - day_start};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace momentrec
