#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momentrec/core/error.hpp"
#include "momentrec/core/matrix.hpp"
#include "momentrec/core/moment_sample.hpp"
#include "momentrec/core/vocabulary.hpp"
#include "momentrec/ingestion/track_record.hpp"

namespace momentrec::dataset {

using ingestion::IngestedData;
using ingestion::TrackRecord;

inline constexpr std::size_t kDefaultVocabularySize = 1000;

struct MomentsDataset {
  TagVocabulary vocabulary;
  std::vector<MomentSample> samples;  // ascending by key, keys unique
  Feature target_feature = Feature::danceability;

  std::size_t non_degenerate_count() const;
  friend bool operator==(const MomentsDataset&, const MomentsDataset&) = default;
};

// Top-k tags by sum of counts over every playback appearance: a track played
// n times contributes n * count for each of its tags. Ties are broken by tag
// name ascending. `plays` maps track key to playback count; tracks missing
// from it count once. Throws Error("empty tag universe") when no track has tags.
TagVocabulary select_top_tags(std::span<const TrackRecord> tracks, const std::map<std::string, std::size_t>& plays,
                              std::size_t k);
TagVocabulary select_top_tags(std::span<const TrackRecord> tracks, std::size_t k);

// One playback inside an interval.
struct PlayRef {
  const Scrobble* scrobble = nullptr;
  const TrackRecord* track = nullptr;
};

// raw[t] = sum of the counts of every appearance of vocabulary tag t.
std::vector<double> aggregate_tag_strengths(std::span<const PlayRef> plays, const TagVocabulary& vocab);

struct NormalizedMoment {
  std::vector<double> strengths;
  bool degenerate = false;
};

// Rescales so the row sums to 100; an all-zero row stays zero and is flagged.
NormalizedMoment normalize_moment(std::span<const double> raw);

// Per-feature arithmetic mean over plays whose track has features. nullopt
// when none does (the interval is dropped).
std::optional<FeatureRow> aggregate_features(std::span<const PlayRef> plays);

struct BuildOptions {
  std::size_t k = kDefaultVocabularySize;
  int tz_offset_minutes = 0;
  Feature target = Feature::danceability;
};

// Groups plays of featured tracks by moment key and emits one row per
// interval. Throws Error on an empty input.
MomentsDataset build_dataset(const IngestedData& data, const BuildOptions& options);
MomentsDataset build_dataset(const std::filesystem::path& cache_dir, const BuildOptions& options);

inline constexpr const char* kTagsFile = "moments_tags.csv";
inline constexpr const char* kFeaturesFile = "moments_features.csv";
inline constexpr const char* kMetaFile = "moments_meta.json";

void write_dataset(const MomentsDataset& ds, const std::filesystem::path& dir);

// Joins the two CSV files on the timestamp column. Throws JoinError naming
// every timestamp present in only one of them.
MomentsDataset read_dataset(const std::filesystem::path& dir);

class JoinError : public FormatError {
 public:
  JoinError(std::string message, std::vector<std::string> offenders)
      : FormatError(std::move(message)), offenders_(std::move(offenders)) {}
  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

struct DatasetSplit {
  std::vector<std::size_t> train;  // sample indices
  std::vector<std::size_t> test;
};

// Seeded uniform partition of indices 0..n-1; train gets floor(fraction * n).
DatasetSplit split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

// Same, over the dataset's samples. Degenerate rows are left out unless asked for.
DatasetSplit split_dataset(const MomentsDataset& ds, double train_fraction, std::uint64_t seed,
                           bool include_degenerate = false);

// Model inputs for a set of rows: tag strengths only (no timestamp), and the target column.
struct Design {
  Matrix x;
  std::vector<double> y;
};

Design make_design(const MomentsDataset& ds, std::span<const std::size_t> rows, Feature target);
Design make_design(const MomentsDataset& ds, std::span<const std::size_t> rows);

}  // namespace momentrec::dataset
