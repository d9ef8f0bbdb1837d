#include "momentrec/core/records.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "momentrec/core/error.hpp"

namespace momentrec {

std::string trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string make_track_key(std::string_view artist, std::string_view track) {
  return ascii_lower(trim(artist)) + " — " + ascii_lower(trim(track));
}

Scrobble Scrobble::make(Instant played_at, std::string_view artist, std::string_view track,
                        std::optional<std::string> mbid) {
  if (played_at.time_since_epoch().count() <= 0) {
    throw ValidationError("scrobble timestamp must be positive");
  }
  Scrobble s;
  s.played_at = played_at;
  s.artist_name = trim(artist);
  s.track_name = trim(track);
  if (s.artist_name.empty() || s.track_name.empty()) {
    throw ValidationError("scrobble needs non-empty artist and track names");
  }
  if (mbid && !trim(*mbid).empty()) s.mbid = trim(*mbid);
  s.track_key = make_track_key(s.artist_name, s.track_name);
  return s;
}

std::string_view to_string(TagSource source) {
  return source == TagSource::track ? "track" : "artist";
}

TagSource tag_source_from_string(std::string_view s) {
  if (s == "track") return TagSource::track;
  if (s == "artist") return TagSource::artist;
  throw ValidationError("unknown tag source: " + std::string(s));
}

TagAssignment TagAssignment::make(std::string_view tag, int count, TagSource source) {
  TagAssignment t{ascii_lower(trim(tag)), count, source};
  if (t.tag.empty()) throw ValidationError("tag name must be non-empty");
  if (count < 0 || count > 100) {
    throw ValidationError("tag count out of range 0..100: " + std::to_string(count));
  }
  return t;
}

std::vector<TagAssignment> dedupe_tags(std::vector<TagAssignment> tags) {
  std::map<std::string, TagAssignment> best;
  for (auto& t : tags) {
    auto it = best.find(t.tag);
    if (it == best.end()) {
      best.emplace(t.tag, std::move(t));
    } else if (t.count > it->second.count) {
      it->second = std::move(t);
    }
  }
  std::vector<TagAssignment> out;
  out.reserve(best.size());
  for (auto& [name, t] : best) out.push_back(std::move(t));
  std::stable_sort(out.begin(), out.end(),
                   [](const TagAssignment& a, const TagAssignment& b) { return a.count > b.count; });
  return out;
}

}  // namespace momentrec
