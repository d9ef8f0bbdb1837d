#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace momentrec {

using Instant = std::chrono::sys_seconds;

// Canonical identity used when the MBID is absent: lowercase
// "artist — title" with surrounding whitespace trimmed.
std::string make_track_key(std::string_view artist, std::string_view track);

std::string trim(std::string_view s);
std::string ascii_lower(std::string_view s);

// One playback event.
struct Scrobble {
  Instant played_at{};
  std::string track_name;
  std::string artist_name;
  std::optional<std::string> mbid;
  std::string track_key;

  // Validates (played_at > 0, non-empty names) and derives track_key.
  static Scrobble make(Instant played_at, std::string_view artist, std::string_view track,
                       std::optional<std::string> mbid = std::nullopt);

  friend bool operator==(const Scrobble&, const Scrobble&) = default;
};

enum class TagSource { track, artist };

std::string_view to_string(TagSource source);
TagSource tag_source_from_string(std::string_view s);

struct TagAssignment {
  std::string tag;
  int count = 0;
  TagSource source = TagSource::track;

  // Lowercases and trims the name; rejects empty names and counts outside 0..100.
  static TagAssignment make(std::string_view tag, int count, TagSource source = TagSource::track);

  friend bool operator==(const TagAssignment&, const TagAssignment&) = default;
};

// Collapses repeated tag names keeping the highest count. Output is sorted by
// descending count, then name.
std::vector<TagAssignment> dedupe_tags(std::vector<TagAssignment> tags);

}  // namespace momentrec
