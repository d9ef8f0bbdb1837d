#include <algorithm>

#include "momentrec/core/error.hpp"
#include "momentrec/core/log.hpp"
#include "momentrec/ingestion/source.hpp"

namespace momentrec::ingestion {

using nlohmann::json;

namespace {

// Last.fm encodes numbers as strings in most payloads.
long long as_integer(const json& j) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number()) return static_cast<long long>(j.get<double>());
  if (j.is_string()) return std::stoll(j.get<std::string>());
  throw ValidationError("expected an integer");
}

// Single results come back as an object instead of a one-element array.
std::vector<json> as_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<json>>();
  if (j.is_object()) return {j};
  return {};
}

std::string text_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object()) {
    if (auto it = j.find("#text"); it != j.end() && it->is_string()) return it->get<std::string>();
    if (auto it = j.find("name"); it != j.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

}  // namespace

LiveSource::LiveSource(ApiConfig config, HttpTransport& transport, Clock& clock, RetryPolicy retry)
    : config_(std::move(config)), limiter_(config_.rate_limit_per_sec, clock), session_(transport, limiter_, clock, retry) {}

json LiveSource::get_json(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers) {
  HttpRequest req;
  req.url = url;
  req.headers = headers;
  const HttpResponse resp = session_.send(req);
  json body = json::parse(resp.body, nullptr, false);
  if (resp.status >= 400 && (body.is_discarded() || !body.is_object())) {
    throw TransportError("HTTP " + std::to_string(resp.status) + " from " + url);
  }
  if (body.is_discarded()) throw TransportError("unparsable response from " + url);
  if (resp.status >= 400) body["__status"] = resp.status;
  return body;
}

ScrobbleBatch LiveSource::fetch_scrobbles(Instant since, Instant until) {
  if (!(since < until)) return ScrobbleBatch{};
  std::vector<Scrobble> raw;
  std::size_t malformed = 0;
  long long total_pages = 1;
  for (long long page = 1; page <= total_pages; ++page) {
    const json body = get_json(make_url(config_.lastfm_base_url,
                                        {{"method", "user.getrecenttracks"},
                                         {"user", config_.lastfm_user},
                                         {"api_key", config_.lastfm_api_key},
                                         {"format", "json"},
                                         {"from", std::to_string(since.time_since_epoch().count())},
                                         {"to", std::to_string(until.time_since_epoch().count())},
                                         {"limit", std::to_string(kScrobblePageSize)},
                                         {"page", std::to_string(page)}}));
    if (body.contains("error")) {
      throw TransportError("Last.fm error: " + body.value("message", std::string("unknown")));
    }
    const json& recent = body.at("recenttracks");
    if (auto attr = recent.find("@attr"); attr != recent.end() && attr->contains("totalPages")) {
      total_pages = as_integer(attr->at("totalPages"));
    }
    if (!recent.contains("track")) continue;
    for (const json& item : as_list(recent.at("track"))) {
      if (item.contains("@attr") && item["@attr"].value("nowplaying", "") == "true") continue;
      try {
        json record{{"ts", as_integer(item.at("date").at("uts"))},
                    {"artist", text_of(item.at("artist"))},
                    {"track", item.at("name").get<std::string>()}};
        if (const std::string mbid = item.value("mbid", ""); !mbid.empty()) record["mbid"] = mbid;
        raw.push_back(scrobble_from_json(record));
      } catch (const std::exception& e) {
        log::warn(std::string("malformed scrobble skipped: ") + e.what());
        ++malformed;
      }
    }
  }
  return finalize_scrobbles(std::move(raw), since, until, malformed);
}

std::vector<TagAssignment> LiveSource::top_tags(const std::vector<std::pair<std::string, std::string>>& query,
                                                TagSource source) {
  auto params = query;
  params.emplace_back("api_key", config_.lastfm_api_key);
  params.emplace_back("format", "json");
  const json body = get_json(make_url(config_.lastfm_base_url, params));
  // Unknown track/artist is reported as an API error; treat it as untagged.
  if (body.contains("error") || !body.contains("toptags")) return {};
  const json& toptags = body.at("toptags");
  if (!toptags.contains("tag")) return {};
  std::vector<TagAssignment> tags;
  for (const json& t : as_list(toptags.at("tag"))) {
    try {
      tags.push_back(TagAssignment::make(t.at("name").get<std::string>(), static_cast<int>(as_integer(t.at("count"))),
                                         source));
    } catch (const std::exception& e) {
      log::warn(std::string("skipping tag: ") + e.what());
    }
  }
  return dedupe_tags(std::move(tags));
}

std::vector<TagAssignment> LiveSource::fetch_track_tags(const TrackRef& track) {
  std::vector<std::pair<std::string, std::string>> query{{"method", "track.gettoptags"}};
  if (track.mbid) {
    query.emplace_back("mbid", *track.mbid);
  } else {
    query.emplace_back("artist", track.artist_name);
    query.emplace_back("track", track.track_name);
  }
  auto tags = top_tags(query, TagSource::track);
  if (!tags.empty()) return tags;
  return top_tags({{"method", "artist.gettoptags"}, {"artist", track.artist_name}}, TagSource::artist);
}

const std::string& LiveSource::spotify_token() {
  if (!token_) {
    HttpRequest req;
    req.method = "POST";
    req.url = config_.spotify_token_url;
    req.content_type = "application/x-www-form-urlencoded";
    req.body = "grant_type=client_credentials";
    req.headers.emplace_back("Authorization",
                             "Basic " + base64_encode(config_.spotify_client_id + ":" + config_.spotify_client_secret));
    const HttpResponse resp = session_.send(req);
    const json body = json::parse(resp.body, nullptr, false);
    if (resp.status != 200 || body.is_discarded() || !body.contains("access_token")) {
      throw TransportError("Spotify token request failed with HTTP " + std::to_string(resp.status));
    }
    token_ = body.at("access_token").get<std::string>();
  }
  return *token_;
}

std::optional<std::string> LiveSource::spotify_track_id(const TrackRef& track) {
  const std::string url = make_url(config_.spotify_api_url + "/search",
                                   {{"q", "track:" + track.track_name + " artist:" + track.artist_name},
                                    {"type", "track"},
                                    {"limit", "1"}});
  const json body = get_json(url, {{"Authorization", "Bearer " + spotify_token()}});
  if (body.contains("__status")) return std::nullopt;
  const json* items = nullptr;
  if (auto t = body.find("tracks"); t != body.end() && t->contains("items")) items = &t->at("items");
  if (!items || !items->is_array() || items->empty()) return std::nullopt;
  return items->at(0).at("id").get<std::string>();
}

FeatureLookup LiveSource::fetch_audio_features(std::span<const TrackRef> tracks) {
  FeatureLookup out;
  std::vector<std::pair<std::string, std::string>> resolved;  // (track_key, spotify id)
  for (const TrackRef& t : tracks) {
    out.features[t.track_key] = std::nullopt;
    if (auto id = spotify_track_id(t)) resolved.emplace_back(t.track_key, *id);
  }
  for (std::size_t start = 0; start < resolved.size(); start += kFeatureBatch) {
    const std::size_t end = std::min(resolved.size(), start + kFeatureBatch);
    std::string ids;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) ids.push_back(',');
      ids += resolved[i].second;
    }
    const json body = get_json(make_url(config_.spotify_api_url + "/audio-features", {{"ids", ids}}),
                               {{"Authorization", "Bearer " + spotify_token()}});
    std::map<std::string, json> by_id;
    if (auto list = body.find("audio_features"); list != body.end() && list->is_array()) {
      for (const json& f : *list) {
        if (f.is_object() && f.contains("id")) by_id.emplace(f.at("id").get<std::string>(), f);
      }
    }
    for (std::size_t i = start; i < end; ++i) {
      const auto it = by_id.find(resolved[i].second);
      if (it == by_id.end()) continue;
      try {
        out.features[resolved[i].first] = features_from_json(it->second);
      } catch (const std::exception& e) {
        log::warn("rejected audio features for '" + resolved[i].first + "': " + e.what());
        ++out.rejected;
      }
    }
  }
  return out;
}

}  // namespace momentrec::ingestion
