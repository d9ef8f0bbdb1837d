#include <algorithm>
#include <set>

#include "momentrec/core/error.hpp"
#include "momentrec/core/log.hpp"
#include "momentrec/ingestion/cache.hpp"
#include "momentrec/ingestion/source.hpp"

namespace momentrec::ingestion {

using nlohmann::json;

ScrobbleBatch finalize_scrobbles(std::vector<Scrobble> raw, Instant since, Instant until, std::size_t malformed) {
  ScrobbleBatch batch;
  batch.malformed = malformed;
  std::erase_if(raw, [&](const Scrobble& s) { return s.played_at < since || s.played_at >= until; });
  batch.received = raw.size() + malformed;
  std::stable_sort(raw.begin(), raw.end(), [](const Scrobble& a, const Scrobble& b) {
    if (a.played_at != b.played_at) return a.played_at < b.played_at;
    return a.track_key < b.track_key;
  });
  for (auto& s : raw) {
    if (!batch.scrobbles.empty() && batch.scrobbles.back().played_at == s.played_at &&
        batch.scrobbles.back().track_key == s.track_key) {
      ++batch.duplicates;
      continue;
    }
    batch.scrobbles.push_back(std::move(s));
  }
  return batch;
}

FixtureSource::FixtureSource(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("fixture directory not found: " + dir.string());
  scrobble_lines_ = read_json_lines(dir / file_name(EntityKind::scrobble), &corrupt_scrobble_lines_);

  const auto index = [&](EntityKind kind, std::map<std::string, json>& into) {
    for (json& line : read_json_lines(dir / file_name(kind))) {
      try {
        into.emplace(record_key(kind, line), std::move(line));
      } catch (const std::exception& e) {
        log::warn(std::string("skipping fixture record: ") + e.what());
      }
    }
  };
  index(EntityKind::track_tags, track_tags_);
  index(EntityKind::artist_tags, artist_tags_);
  index(EntityKind::features, features_);
}

ScrobbleBatch FixtureSource::fetch_scrobbles(Instant since, Instant until) {
  if (!(since < until)) return ScrobbleBatch{};
  std::vector<Scrobble> raw;
  std::size_t malformed = corrupt_scrobble_lines_;
  for (const json& line : scrobble_lines_) {
    try {
      raw.push_back(scrobble_from_json(line));
    } catch (const std::exception& e) {
      log::warn(std::string("malformed scrobble skipped: ") + e.what());
      ++malformed;
    }
  }
  return finalize_scrobbles(std::move(raw), since, until, malformed);
}

std::vector<TagAssignment> FixtureSource::fetch_track_tags(const TrackRef& track) {
  if (auto it = track_tags_.find(track.track_key); it != track_tags_.end()) {
    auto tags = tags_from_json(it->second.at("tags"), TagSource::track);
    if (!tags.empty()) return tags;
  }
  if (auto it = artist_tags_.find(ascii_lower(trim(track.artist_name))); it != artist_tags_.end()) {
    auto tags = tags_from_json(it->second.at("tags"), TagSource::artist);
    for (auto& t : tags) t.source = TagSource::artist;
    return tags;
  }
  return {};
}

FeatureLookup FixtureSource::fetch_audio_features(std::span<const TrackRef> tracks) {
  FeatureLookup out;
  for (const TrackRef& t : tracks) {
    std::optional<AudioFeatures> features;
    if (auto it = features_.find(t.track_key); it != features_.end()) {
      const json& f = it->second.at("features");
      if (!f.is_null()) {
        try {
          features = features_from_json(f);
        } catch (const std::exception& e) {
          log::warn("rejected audio features for '" + t.track_key + "': " + e.what());
          ++out.rejected;
        }
      }
    }
    out.features[t.track_key] = std::move(features);
  }
  return out;
}

std::unique_ptr<MusicDataSource> make_source(const ApiConfig& config, HttpTransport& transport, Clock& clock) {
  config.validate();
  if (config.mode == Mode::offline) return std::make_unique<FixtureSource>(config.fixtures_dir);
  return std::make_unique<LiveSource>(config, transport, clock);
}

}  // namespace momentrec::ingestion
