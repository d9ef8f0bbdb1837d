#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "momentrec/ingestion/cache.hpp"
#include "momentrec/ingestion/source.hpp"

namespace momentrec::ingestion {

// Totals satisfy fetched == kept + skipped_malformed + filtered_no_features.
// `fetched` counts records received after duplicate removal.
struct IngestReport {
  std::size_t fetched = 0;
  std::size_t kept = 0;
  std::size_t skipped_malformed = 0;
  std::size_t filtered_no_features = 0;
  std::size_t duplicates_removed = 0;
  std::size_t features_rejected = 0;
  std::size_t tracks = 0;
  std::size_t tracks_with_features = 0;
  std::size_t tracks_artist_fallback = 0;
  std::size_t tracks_untagged = 0;

  bool balanced() const { return fetched == kept + skipped_malformed + filtered_no_features; }
  nlohmann::json to_json() const;
};

// Pulls scrobbles in [since, until), then tags and audio features for every
// distinct track not already cached, writing everything into `cache`.
// Tracks are processed in track-key order so output never depends on
// arrival order. Writes ingest_report.json next to the cache files.
IngestReport ingest(MusicDataSource& source, RecordCache& cache, Instant since, Instant until);

// Reads a cache directory back into memory.
IngestedData load_ingested(const std::filesystem::path& cache_dir);

}  // namespace momentrec::ingestion
