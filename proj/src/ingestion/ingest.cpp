#include "momentrec/ingestion/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "momentrec/core/error.hpp"
#include "momentrec/core/log.hpp"

namespace momentrec::ingestion {

using nlohmann::json;

json IngestReport::to_json() const {
  return json{{"fetched", fetched},
              {"kept", kept},
              {"skipped_malformed", skipped_malformed},
              {"filtered_no_features", filtered_no_features},
              {"duplicates_removed", duplicates_removed},
              {"features_rejected", features_rejected},
              {"tracks", tracks},
              {"tracks_with_features", tracks_with_features},
              {"tracks_artist_fallback", tracks_artist_fallback},
              {"tracks_untagged", tracks_untagged}};
}

IngestReport ingest(MusicDataSource& source, RecordCache& cache, Instant since, Instant until) {
  IngestReport report;
  ScrobbleBatch batch = source.fetch_scrobbles(since, until);
  report.fetched = batch.received - batch.duplicates;
  report.skipped_malformed = batch.malformed;
  report.duplicates_removed = batch.duplicates;

  std::map<std::string, TrackRef> tracks;
  for (const Scrobble& s : batch.scrobbles) {
    cache.store(EntityKind::scrobble, scrobble_to_json(s));
    tracks.try_emplace(s.track_key, TrackRef::of(s));
  }
  report.tracks = tracks.size();

  for (const auto& [key, ref] : tracks) {
    std::vector<TagAssignment> tags;
    if (auto cached = cache.load(EntityKind::track_tags, key)) {
      tags = tags_from_json(cached->at("tags"), TagSource::track);
    } else {
      tags = source.fetch_track_tags(ref);
      cache.store(EntityKind::track_tags, json{{"track_key", key}, {"tags", tags_to_json(tags)}});
    }
    if (tags.empty()) {
      ++report.tracks_untagged;
    } else if (tags.front().source == TagSource::artist) {
      ++report.tracks_artist_fallback;
    }
  }

  std::vector<TrackRef> missing;
  std::map<std::string, bool> has_features;
  for (const auto& [key, ref] : tracks) {
    if (auto cached = cache.load(EntityKind::features, key)) {
      has_features[key] = !cached->at("features").is_null();
    } else {
      missing.push_back(ref);
    }
  }
  if (!missing.empty()) {
    FeatureLookup lookup = source.fetch_audio_features(missing);
    report.features_rejected = lookup.rejected;
    for (const TrackRef& ref : missing) {
      const auto& f = lookup.features[ref.track_key];
      cache.store(EntityKind::features,
                  json{{"track_key", ref.track_key}, {"features", f ? features_to_json(*f) : json(nullptr)}});
      has_features[ref.track_key] = f.has_value();
    }
  }

  for (const auto& [key, present] : has_features) report.tracks_with_features += present ? 1 : 0;
  for (const Scrobble& s : batch.scrobbles) {
    if (has_features[s.track_key]) {
      ++report.kept;
    } else {
      ++report.filtered_no_features;
    }
  }

  std::ofstream out(cache.dir() / "ingest_report.json");
  out << report.to_json().dump(2) << '\n';
  return report;
}

IngestedData load_ingested(const std::filesystem::path& cache_dir) {
  if (!std::filesystem::is_directory(cache_dir)) throw Error("cache directory not found: " + cache_dir.string());
  RecordCache cache(cache_dir);
  IngestedData data;
  for (const json& line : cache.load_all(EntityKind::scrobble)) {
    try {
      data.scrobbles.push_back(scrobble_from_json(line));
    } catch (const std::exception& e) {
      log::warn(std::string("skipping cached scrobble: ") + e.what());
    }
  }
  std::stable_sort(data.scrobbles.begin(), data.scrobbles.end(), [](const Scrobble& a, const Scrobble& b) {
    if (a.played_at != b.played_at) return a.played_at < b.played_at;
    return a.track_key < b.track_key;
  });

  for (const Scrobble& s : data.scrobbles) {
    auto [it, inserted] = data.tracks.try_emplace(s.track_key);
    if (inserted) it->second = TrackRecord{s.track_key, s.artist_name, s.track_name, s.mbid, {}, std::nullopt};
  }
  for (const json& line : cache.load_all(EntityKind::track_tags)) {
    auto it = data.tracks.find(line.at("track_key").get<std::string>());
    if (it == data.tracks.end()) continue;
    try {
      it->second.tags = tags_from_json(line.at("tags"), TagSource::track);
    } catch (const std::exception& e) {
      log::warn(std::string("skipping cached tags: ") + e.what());
    }
  }
  for (const json& line : cache.load_all(EntityKind::features)) {
    auto it = data.tracks.find(line.at("track_key").get<std::string>());
    if (it == data.tracks.end() || line.at("features").is_null()) continue;
    try {
      it->second.features = features_from_json(line.at("features"));
    } catch (const std::exception& e) {
      log::warn(std::string("skipping cached features: ") + e.what());
    }
  }
  return data;
}

}  // namespace momentrec::ingestion
