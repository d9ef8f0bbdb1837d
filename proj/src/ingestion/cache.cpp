#include "momentrec/ingestion/cache.hpp"

#include <fstream>

#include "momentrec/core/error.hpp"
#include "momentrec/core/log.hpp"
#include "momentrec/core/records.hpp"
#include "momentrec/ingestion/track_record.hpp"

namespace momentrec::ingestion {

using nlohmann::json;

std::string_view file_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::scrobble: return "scrobbles.jsonl";
    case EntityKind::track_tags: return "tags.jsonl";
    case EntityKind::artist_tags: return "artist_tags.jsonl";
    case EntityKind::features: return "features.jsonl";
  }
  return "unknown.jsonl";
}

std::string record_key(EntityKind kind, const json& record) {
  switch (kind) {
    case EntityKind::scrobble: {
      const Scrobble s = scrobble_from_json(record);
      return std::to_string(s.played_at.time_since_epoch().count()) + "|" + s.track_key;
    }
    case EntityKind::track_tags:
    case EntityKind::features:
      return record.at("track_key").get<std::string>();
    case EntityKind::artist_tags:
      return ascii_lower(trim(record.at("artist").get<std::string>()));
  }
  throw ValidationError("unknown entity kind");
}

std::vector<json> read_json_lines(const std::filesystem::path& path, std::size_t* corrupt) {
  std::vector<json> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      log::warn(path.string() + ":" + std::to_string(line_no) + ": skipping corrupt line");
      if (corrupt) ++*corrupt;
      continue;
    }
    out.push_back(std::move(j));
  }
  return out;
}

RecordCache::RecordCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

RecordCache::Table& RecordCache::table(EntityKind kind) {
  Table& t = tables_[static_cast<std::size_t>(kind)];
  if (t.loaded) return t;
  t.loaded = true;
  for (json& record : read_json_lines(dir_ / file_name(kind), &corrupt_)) {
    std::string key;
    try {
      key = record_key(kind, record);
    } catch (const std::exception& e) {
      log::warn(std::string("skipping cache record without a valid key: ") + e.what());
      ++corrupt_;
      continue;
    }
    if (t.index.contains(key)) continue;
    t.index.emplace(std::move(key), t.records.size());
    t.records.push_back(std::move(record));
  }
  return t;
}

bool RecordCache::store(EntityKind kind, const json& record) {
  std::lock_guard lock(mutex_);
  Table& t = table(kind);
  std::string key = record_key(kind, record);
  if (t.index.contains(key)) return false;
  std::ofstream out(dir_ / file_name(kind), std::ios::app);
  if (!out) throw Error("cannot write cache file in " + dir_.string());
  out << record.dump() << '\n';
  out.flush();
  t.index.emplace(std::move(key), t.records.size());
  t.records.push_back(record);
  return true;
}

std::optional<json> RecordCache::load(EntityKind kind, const std::string& key) {
  std::lock_guard lock(mutex_);
  Table& t = table(kind);
  const auto it = t.index.find(key);
  if (it == t.index.end()) return std::nullopt;
  return t.records[it->second];
}

std::vector<json> RecordCache::load_all(EntityKind kind) {
  std::lock_guard lock(mutex_);
  return table(kind).records;
}

std::size_t RecordCache::corrupt_lines() {
  std::lock_guard lock(mutex_);
  for (std::size_t k = 0; k < tables_.size(); ++k) table(static_cast<EntityKind>(k));
  return corrupt_;
}

}  // namespace momentrec::ingestion
