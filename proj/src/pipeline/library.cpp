#include <algorithm>
#include <fstream>

#include "momentrec/core/error.hpp"
#include "momentrec/ingestion/cache.hpp"
#include "momentrec/ingestion/ingest.hpp"
#include "momentrec/pipeline/pipeline.hpp"

namespace momentrec::pipeline {

namespace fs = std::filesystem;

TrackLibrary library_from_ingested(const dataset::IngestedData& data) {
  std::map<std::string, std::size_t> plays;
  for (const Scrobble& s : data.scrobbles) ++plays[s.track_key];
  TrackLibrary out;
  for (const auto& [key, track] : data.tracks) {
    if (!track.features) continue;
    const auto it = plays.find(key);
    out.push_back({key, track.artist_name, track.track_name, *track.features, it == plays.end() ? 0 : it->second});
  }
  return out;
}

void save_library(const TrackLibrary& library, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const LibraryTrack& t : library) {
    nlohmann::json j{{"track_key", t.track_key},
                     {"artist", t.artist_name},
                     {"track", t.track_name},
                     {"play_count", t.play_count},
                     {"features", ingestion::features_to_json(t.features)}};
    out << j.dump() << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

TrackLibrary load_library(const fs::path& path) {
  if (fs::is_directory(path)) {
    if (fs::exists(path / kLibraryFile)) return load_library(path / kLibraryFile);
    if (fs::exists(path / ingestion::file_name(ingestion::EntityKind::scrobble))) {
      return library_from_ingested(ingestion::load_ingested(path));
    }
    throw Error("no library found in " + path.string());
  }
  if (!fs::exists(path)) throw Error("no such library file: " + path.string());

  std::size_t corrupt = 0;
  TrackLibrary out;
  for (const nlohmann::json& j : ingestion::read_json_lines(path, &corrupt)) {
    try {
      out.push_back({j.at("track_key").get<std::string>(), j.at("artist").get<std::string>(),
                     j.at("track").get<std::string>(), ingestion::features_from_json(j.at("features")),
                     j.value("play_count", std::size_t{0})});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("bad library record in " + path.string() + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LibraryTrack& a, const LibraryTrack& b) { return a.track_key < b.track_key; });
  return out;
}

}  // namespace momentrec::pipeline
