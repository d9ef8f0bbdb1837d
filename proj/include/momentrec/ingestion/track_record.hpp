#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "momentrec/core/audio_features.hpp"
#include "momentrec/core/records.hpp"

namespace momentrec::ingestion {

// What a client needs to look a track up remotely.
struct TrackRef {
  std::string track_key;
  std::string artist_name;
  std::string track_name;
  std::optional<std::string> mbid;

  static TrackRef of(const Scrobble& s) { return {s.track_key, s.artist_name, s.track_name, s.mbid}; }
};

struct TrackRecord {
  std::string track_key;
  std::string artist_name;
  std::string track_name;
  std::optional<std::string> mbid;
  std::vector<TagAssignment> tags;  // deduplicated, max count wins
  std::optional<AudioFeatures> features;
};

// Everything build-dataset needs, as loaded back from a cache directory.
struct IngestedData {
  std::vector<Scrobble> scrobbles;  // ascending by (played_at, track_key)
  std::map<std::string, TrackRecord> tracks;
};

// JSON shapes shared by fixtures, the cache and the library file.
nlohmann::json scrobble_to_json(const Scrobble& s);
Scrobble scrobble_from_json(const nlohmann::json& j);

nlohmann::json tags_to_json(const std::vector<TagAssignment>& tags);
std::vector<TagAssignment> tags_from_json(const nlohmann::json& j, TagSource default_source);

nlohmann::json features_to_json(const AudioFeatures& f);
AudioFeatures features_from_json(const nlohmann::json& j);

}  // namespace momentrec::ingestion
