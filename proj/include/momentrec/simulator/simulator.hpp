#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "momentrec/core/records.hpp"

namespace momentrec::simulator {

struct TagDraw {
  std::string tag;
  int count_min = 1;
  int count_max = 100;
};

struct Normal {
  double mean = 0.5;
  double stddev = 0.0;
};

// Tracks of a regime are played only at its hours. `hour_start` may exceed
// `hour_end`, in which case the range wraps past midnight.
struct Regime {
  std::string name;
  int hour_start = 0;
  int hour_end = 24;
  double weight = 1.0;  // share of listening sessions
  std::vector<TagDraw> tags;
  Normal danceability;

  std::vector<int> hours() const;
};

struct NoiseTags {
  int pool_size = 0;  // distinct filler tags shared by every regime
  int per_track = 0;
  int count_min = 1;
  int count_max = 10;
};

struct ListenerSpec {
  std::uint64_t seed = 1;
  int plays_total = 0;
  int tracks_per_regime = 50;
  int tracks_per_artist = 4;
  std::string start_date = "2019-01-01";
  int span_days = 365;
  double plays_per_session = 4.0;  // mean of a geometric session length
  NoiseTags noise_tags;
  double artist_fallback_fraction = 0.0;  // tracks tagged only at artist level
  double missing_features_fraction = 0.0;
  std::vector<Regime> regimes;

  // Throws ValidationError on overlapping hours, negative stds, etc.
  void validate() const;
};

ListenerSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ListenerSpec& spec);
ListenerSpec load_spec(const std::filesystem::path& path);

// Night/day/evening listener with hours 6 and 7 never played.
ListenerSpec default_spec();

struct GenerationSummary {
  std::size_t scrobbles = 0;
  std::size_t tracks = 0;
  std::size_t artist_fallback_tracks = 0;
  std::size_t featureless_tracks = 0;
};

// Writes scrobbles.jsonl, tags.jsonl, artist_tags.jsonl and features.jsonl.
// Identical specs produce byte-identical files.
GenerationSummary generate_history(const ListenerSpec& spec, const std::filesystem::path& out_dir);

}  // namespace momentrec::simulator
