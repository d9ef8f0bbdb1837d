#include "momentrec/ingestion/track_record.hpp"

#include <cmath>

#include "momentrec/core/error.hpp"

namespace momentrec::ingestion {
namespace {

using nlohmann::json;

long long integral(const json& j, const char* name) {
  const json& v = j.at(name);
  if (v.is_number_integer()) return v.get<long long>();
  const double d = v.get<double>();
  if (!std::isfinite(d) || std::floor(d) != d) {
    throw ValidationError(std::string("audio feature ") + name + " must be an integer");
  }
  return static_cast<long long>(d);
}

}  // namespace

json scrobble_to_json(const Scrobble& s) {
  json j{{"ts", s.played_at.time_since_epoch().count()}, {"artist", s.artist_name}, {"track", s.track_name}};
  if (s.mbid) j["mbid"] = *s.mbid;
  return j;
}

Scrobble scrobble_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scrobble record is not an object");
  const json& ts = j.at("ts");
  long long seconds = 0;
  if (ts.is_number_integer()) {
    seconds = ts.get<long long>();
  } else if (ts.is_string()) {
    seconds = std::stoll(ts.get<std::string>());
  } else {
    throw ValidationError("scrobble ts must be an integer");
  }
  std::optional<std::string> mbid;
  if (auto it = j.find("mbid"); it != j.end() && it->is_string()) mbid = it->get<std::string>();
  return Scrobble::make(Instant{std::chrono::seconds{seconds}}, j.at("artist").get<std::string>(),
                        j.at("track").get<std::string>(), mbid);
}

json tags_to_json(const std::vector<TagAssignment>& tags) {
  json arr = json::array();
  for (const auto& t : tags) arr.push_back({{"tag", t.tag}, {"count", t.count}, {"source", to_string(t.source)}});
  return arr;
}

std::vector<TagAssignment> tags_from_json(const json& j, TagSource default_source) {
  std::vector<TagAssignment> out;
  for (const auto& item : j) {
    TagSource source = default_source;
    if (auto it = item.find("source"); it != item.end()) source = tag_source_from_string(it->get<std::string>());
    out.push_back(TagAssignment::make(item.at("tag").get<std::string>(), item.at("count").get<int>(), source));
  }
  return dedupe_tags(std::move(out));
}

json features_to_json(const AudioFeatures& f) {
  const auto& v = f.fields();
  return json{{"acousticness", v.acousticness}, {"danceability", v.danceability},
              {"duration_ms", v.duration_ms},   {"energy", v.energy},
              {"instrumentalness", v.instrumentalness},
              {"key", v.key},                   {"liveness", v.liveness},
              {"loudness", v.loudness},         {"mode", v.mode},
              {"speechiness", v.speechiness},   {"tempo", v.tempo},
              {"valence", v.valence}};
}

AudioFeatures features_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("features record is not an object");
  AudioFeatures::Fields f;
  f.acousticness = j.at("acousticness").get<double>();
  f.danceability = j.at("danceability").get<double>();
  f.duration_ms = integral(j, "duration_ms");
  f.energy = j.at("energy").get<double>();
  f.instrumentalness = j.at("instrumentalness").get<double>();
  f.key = static_cast<int>(integral(j, "key"));
  f.liveness = j.at("liveness").get<double>();
  f.loudness = j.at("loudness").get<double>();
  f.mode = static_cast<int>(integral(j, "mode"));
  f.speechiness = j.at("speechiness").get<double>();
  f.tempo = j.at("tempo").get<double>();
  f.valence = j.at("valence").get<double>();
  return AudioFeatures(f);
}

}  // namespace momentrec::ingestion
