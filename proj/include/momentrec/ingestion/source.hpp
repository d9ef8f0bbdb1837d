#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momentrec/ingestion/api_config.hpp"
#include "momentrec/ingestion/http.hpp"
#include "momentrec/ingestion/track_record.hpp"

namespace momentrec::ingestion {

struct ScrobbleBatch {
  std::vector<Scrobble> scrobbles;  // [since, until), ascending, deduplicated
  std::size_t received = 0;         // raw records seen, malformed included
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
};

struct FeatureLookup {
  std::map<std::string, std::optional<AudioFeatures>> features;  // by track key
  std::size_t rejected = 0;  // present remotely but outside valid ranges
};

// Where raw listening data comes from: the web APIs or fixture files.
class MusicDataSource {
 public:
  virtual ~MusicDataSource() = default;

  virtual ScrobbleBatch fetch_scrobbles(Instant since, Instant until) = 0;
  // Track-level tags, falling back to artist tags (source=artist) when the
  // track has none. Both untagged: empty list.
  virtual std::vector<TagAssignment> fetch_track_tags(const TrackRef& track) = 0;
  virtual FeatureLookup fetch_audio_features(std::span<const TrackRef> tracks) = 0;
};

// Sort ascending, drop records outside [since, until) and repeated
// (instant, track_key) pairs.
ScrobbleBatch finalize_scrobbles(std::vector<Scrobble> raw, Instant since, Instant until, std::size_t malformed);

class FixtureSource final : public MusicDataSource {
 public:
  // Reads scrobbles.jsonl, tags.jsonl, artist_tags.jsonl (optional) and
  // features.jsonl from `dir`.
  explicit FixtureSource(const std::filesystem::path& dir);

  ScrobbleBatch fetch_scrobbles(Instant since, Instant until) override;
  std::vector<TagAssignment> fetch_track_tags(const TrackRef& track) override;
  FeatureLookup fetch_audio_features(std::span<const TrackRef> tracks) override;

 private:
  std::vector<nlohmann::json> scrobble_lines_;
  std::size_t corrupt_scrobble_lines_ = 0;
  std::map<std::string, nlohmann::json> track_tags_;
  std::map<std::string, nlohmann::json> artist_tags_;
  std::map<std::string, nlohmann::json> features_;
};

// Last.fm + Spotify web APIs behind one rate-limited, retrying session.
class LiveSource final : public MusicDataSource {
 public:
  LiveSource(ApiConfig config, HttpTransport& transport, Clock& clock, RetryPolicy retry = {});

  ScrobbleBatch fetch_scrobbles(Instant since, Instant until) override;
  std::vector<TagAssignment> fetch_track_tags(const TrackRef& track) override;
  FeatureLookup fetch_audio_features(std::span<const TrackRef> tracks) override;

  std::size_t requests_sent() const { return session_.requests_sent(); }

  static constexpr std::size_t kFeatureBatch = 100;
  static constexpr int kScrobblePageSize = 200;

 private:
  nlohmann::json get_json(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers = {});
  std::vector<TagAssignment> top_tags(const std::vector<std::pair<std::string, std::string>>& query, TagSource source);
  const std::string& spotify_token();
  std::optional<std::string> spotify_track_id(const TrackRef& track);

  ApiConfig config_;
  RateLimiter limiter_;
  ApiSession session_;
  std::optional<std::string> token_;
};

std::unique_ptr<MusicDataSource> make_source(const ApiConfig& config, HttpTransport& transport, Clock& clock);

}  // namespace momentrec::ingestion
