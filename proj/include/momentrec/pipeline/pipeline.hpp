#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "momentrec/dataset/dataset.hpp"
#include "momentrec/models/regressor.hpp"

namespace momentrec::pipeline {

using dataset::MomentsDataset;
using models::TrainedRegressor;

// Mean tag-strength row over every non-degenerate moment at one hour of day.
struct HourProfile {
  int hour = 0;
  std::vector<double> tag_strengths;
  std::size_t support = 0;  // moments averaged at this hour
  bool fallback = false;    // support was 0, global mean used instead
};

// A rankable track from the user's collection.
struct LibraryTrack {
  std::string track_key;
  std::string artist_name;
  std::string track_name;
  AudioFeatures features;
  std::size_t play_count = 0;
};

using TrackLibrary = std::vector<LibraryTrack>;

struct Recommendation {
  std::string track_key;
  std::string track_name;
  std::string artist_name;
  double feature_value = 0.0;
  double distance = 0.0;  // |feature_value - predicted|
  int rank = 1;           // position in the current ordering
  int phase3_rank = 1;
  std::size_t play_count = 0;
  double novelty = 0.0;    // filled by phase 4
  double proximity = 0.0;  // filled by phase 4
  double score = 0.0;      // filled by phase 4
};

struct PipelineResult {
  int hour = 0;
  std::vector<std::pair<std::string, double>> top_tags;
  std::size_t profile_support = 0;
  bool profile_fallback = false;
  std::string model_kind;
  Feature target = Feature::danceability;
  std::map<std::string, double> predicted_features;
  double epsilon = 0.0;
  std::vector<Recommendation> recommendations;
  std::array<std::string, 4> explanations;
};

inline constexpr std::size_t kDefaultK = 20;
inline constexpr std::size_t kDisplayTags = 10;

// Throws ValidationError for an hour outside 0..23 or an empty dataset.
HourProfile phase1_tag_profile(const MomentsDataset& ds, int hour);

// Model output for the profile, clamped to the target range. When `vocab` is
// given and the model recorded its own vocabulary, the two must match.
double phase2_predict(const TrainedRegressor& model, const HourProfile& profile, const TagVocabulary* vocab = nullptr);

// k closest candidates by |feature - predicted|, ties by track key.
std::vector<Recommendation> phase3_rank(std::span<const LibraryTrack> candidates, double predicted, Feature target,
                                        std::size_t k);

// Blends proximity and novelty:
//   novelty   = 1 - plays / max plays          (1 when nobody has plays)
//   proximity = 1 - distance / max distance    (1 when all distances are 0)
//   score     = (1 - epsilon) * proximity + epsilon * novelty
// Sorted by descending score, ties by incoming rank.
std::vector<Recommendation> phase4_rerank(std::vector<Recommendation> recs, double epsilon,
                                          const std::map<std::string, std::size_t>& play_counts);

struct PipelineRequest {
  int hour = 0;
  std::size_t k = kDefaultK;
  double epsilon = 0.0;
};

PipelineResult run_pipeline(const MomentsDataset& ds, const TrainedRegressor& model, std::span<const LibraryTrack> library,
                            const PipelineRequest& request);

// Terminal report in the "PHASE 1: ..." layout. `clock_text` is shown as the
// current time (defaults to "HH:00").
std::string render_report(const PipelineResult& result, const std::string& clock_text = {});

nlohmann::json to_json(const PipelineResult& result);
nlohmann::json to_json(const HourProfile& profile, const TagVocabulary& vocab, std::size_t top_n);

// Top `n` (tag, strength) pairs of a row, strongest first, ties by name.
std::vector<std::pair<std::string, double>> top_tags(std::span<const double> strengths, const TagVocabulary& vocab,
                                                     std::size_t n);

// Every track with audio features, with its play count, ordered by key.
TrackLibrary library_from_ingested(const dataset::IngestedData& data);

inline constexpr const char* kLibraryFile = "library.jsonl";

void save_library(const TrackLibrary& library, const std::filesystem::path& path);
// `path` may be a library file, a directory holding library.jsonl, or an
// ingest cache directory.
TrackLibrary load_library(const std::filesystem::path& path);

}  // namespace momentrec::pipeline
