#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace momentrec::ingestion {

enum class EntityKind { scrobble, track_tags, artist_tags, features };

std::string_view file_name(EntityKind kind);

// Key a record is stored under: "<ts>|<track_key>" for scrobbles, the track
// key for tags/features, the lowercased artist for artist tags.
std::string record_key(EntityKind kind, const nlohmann::json& record);

// Write-once JSON-lines store, one file per entity kind. The file layout is
// the same as the offline fixture layout, so a cache directory can be fed
// back in as fixtures.
class RecordCache {
 public:
  explicit RecordCache(std::filesystem::path dir);

  // Appends the record unless its key is already present. Returns true if written.
  bool store(EntityKind kind, const nlohmann::json& record);
  std::optional<nlohmann::json> load(EntityKind kind, const std::string& key);
  // All records of a kind, in the order they were first stored.
  std::vector<nlohmann::json> load_all(EntityKind kind);

  // Lines skipped (with a warning) because they failed to parse.
  std::size_t corrupt_lines();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Table {
    bool loaded = false;
    std::map<std::string, std::size_t> index;
    std::vector<nlohmann::json> records;
  };

  Table& table(EntityKind kind);

  std::filesystem::path dir_;
  std::mutex mutex_;
  std::array<Table, 4> tables_;
  std::size_t corrupt_ = 0;
};

// Reads every JSON line of a file; unparsable lines are counted and skipped.
std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path, std::size_t* corrupt = nullptr);

}  // namespace momentrec::ingestion
