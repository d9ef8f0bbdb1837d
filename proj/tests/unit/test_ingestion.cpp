#include <atomic>
#include <deque>
#include <map>
#include <thread>

#include "doctest.h"
#include "fixture.hpp"
#include "httplib.h"
#include "momentrec/core/error.hpp"
#include "momentrec/core/moment_key.hpp"
#include "momentrec/dataset/dataset.hpp"
#include "momentrec/ingestion/cache.hpp"
#include "momentrec/ingestion/ingest.hpp"
#include "momentrec/ingestion/source.hpp"

using namespace momentrec;
using namespace momentrec::ingestion;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

const Instant kSince = parse_iso_instant("2021-01-01");
const Instant kUntil = parse_iso_instant("2022-01-01");

// Plays scripted responses; records every request.
class ScriptedTransport final : public HttpTransport {
 public:
  std::deque<std::function<HttpResponse()>> script;
  std::vector<HttpRequest> seen;

  HttpResponse send(const HttpRequest& request) override {
    seen.push_back(request);
    if (script.empty()) return {200, "{}"};
    auto next = std::move(script.front());
    script.pop_front();
    return next();
  }
};

// Serves a fixture directory through the Last.fm and Spotify request shapes.
class FakeWebApis final : public HttpTransport {
 public:
  explicit FakeWebApis(const std::filesystem::path& fixture, int page_size = 3) : page_size_(page_size) {
    std::ifstream in(fixture / "scrobbles.jsonl");
    for (std::string line; std::getline(in, line);) {
      json j = json::parse(line, nullptr, false);
      // An unreadable line upstream becomes an item without a timestamp.
      scrobbles_.push_back(j.is_discarded() ? json{{"name", "?"}, {"artist", {{"#text", "?"}}}} : j);
    }
    for (const json& j : read_json_lines(fixture / "tags.jsonl")) track_tags_[j.at("track_key")] = j.at("tags");
    for (const json& j : read_json_lines(fixture / "artist_tags.jsonl")) artist_tags_[j.at("artist")] = j.at("tags");
    for (const json& j : read_json_lines(fixture / "features.jsonl")) features_[j.at("track_key")] = j.at("features");
  }

  std::size_t requests = 0;
  int fail_first = 0;  // leading requests answered with 503

  HttpResponse send(const HttpRequest& r) override {
    ++requests;
    if (fail_first > 0) {
      --fail_first;
      return {503, "busy"};
    }
    const auto q = r.url.find('?');
    const std::string path = r.url.substr(0, q);
    httplib::Params params;
    if (q != std::string::npos) httplib::detail::parse_query_text(r.url.substr(q + 1), params);
    const auto param = [&](const std::string& k) {
      auto it = params.find(k);
      return it == params.end() ? std::string() : it->second;
    };

    if (path == "https://lastfm.test/2.0/") {
      const std::string method = param("method");
      if (method == "user.getrecenttracks") return recent(std::stoi(param("page")), std::stoll(param("from")),
                                                          std::stoll(param("to")));
      if (method == "track.gettoptags") return toptags(track_tags_, make_track_key(param("artist"), param("track")));
      if (method == "artist.gettoptags") return toptags(artist_tags_, ascii_lower(trim(param("artist"))));
    }
    if (path == "https://accounts.test/token") {
      if (r.method != "POST" || r.headers.empty() || r.headers[0].second != "Basic aWQ6c2VjcmV0") return {401, "{}"};
      return {200, R"({"access_token":"tok","expires_in":3600})"};
    }
    if (path == "https://spotify.test/v1/search") {
      const std::string query = param("q");
      const auto split = query.find(" artist:");
      const std::string key = make_track_key(query.substr(split + 8), query.substr(6, split - 6));
      json items = json::array();
      if (features_.count(key)) items.push_back({{"id", id_of(key)}});
      return {200, json{{"tracks", {{"items", items}}}}.dump()};
    }
    if (path == "https://spotify.test/v1/audio-features") {
      json list = json::array();
      std::string ids = param("ids");
      ++feature_batches;
      for (std::size_t start = 0; start <= ids.size();) {
        const auto comma = std::min(ids.find(',', start), ids.size());
        const std::string id = ids.substr(start, comma - start);
        const json& f = features_.at(key_of(id));
        if (f.is_null()) {
          list.push_back(nullptr);
        } else {
          json item = f;
          item["id"] = id;
          list.push_back(item);
        }
        start = comma + 1;
      }
      return {200, json{{"audio_features", list}}.dump()};
    }
    return {404, R"({"error":"not found"})"};
  }

  int feature_batches = 0;

 private:
  HttpResponse recent(int page, long long from, long long to) {
    std::vector<json> in_range;
    for (const json& s : scrobbles_) {
      if (!s.contains("ts")) {
        in_range.push_back(s);
        continue;
      }
      const long long ts = s.at("ts");
      if (ts >= from && ts < to) in_range.push_back(s);
    }
    const int pages = std::max<int>(1, static_cast<int>((in_range.size() + page_size_ - 1) / page_size_));
    json tracks = json::array();
    if (page == 1) {
      tracks.push_back({{"name", "Live Now"}, {"artist", {{"#text", "Someone"}}}, {"@attr", {{"nowplaying", "true"}}}});
    }
    for (std::size_t i = static_cast<std::size_t>(page - 1) * page_size_;
         i < in_range.size() && i < static_cast<std::size_t>(page) * page_size_; ++i) {
      const json& s = in_range[i];
      if (!s.contains("ts")) {
        tracks.push_back(s);  // already in the upstream shape
        continue;
      }
      json item{{"name", s.value("track", "")}, {"artist", {{"#text", s.value("artist", "")}}}, {"mbid", ""}};
      if (s.contains("ts")) item["date"] = {{"uts", std::to_string(s.at("ts").get<long long>())}};
      tracks.push_back(item);
    }
    return {200, json{{"recenttracks", {{"track", tracks}, {"@attr", {{"totalPages", std::to_string(pages)}}}}}}.dump()};
  }

  static HttpResponse toptags(const std::map<std::string, json>& table, const std::string& key) {
    const auto it = table.find(key);
    if (it == table.end()) return {200, R"({"error":6,"message":"not found"})"};
    json tags = json::array();
    for (const json& t : it->second) tags.push_back({{"name", t.at("tag")}, {"count", t.at("count")}});
    return {200, json{{"toptags", {{"tag", tags}}}}.dump()};
  }

  std::string id_of(const std::string& key) {
    auto [it, inserted] = ids_.try_emplace(key, "sp" + std::to_string(ids_.size()));
    keys_[it->second] = key;
    return it->second;
  }
  std::string key_of(const std::string& id) const { return keys_.at(id); }

  int page_size_;
  std::vector<json> scrobbles_;
  std::map<std::string, json> track_tags_, artist_tags_, features_;
  std::map<std::string, std::string> ids_, keys_;
};

ApiConfig live_config(const std::filesystem::path& cache) {
  ApiConfig c;
  c.mode = Mode::live;
  c.lastfm_api_key = "key";
  c.lastfm_user = "listener";
  c.spotify_client_id = "id";
  c.spotify_client_secret = "secret";
  c.cache_dir = cache;
  c.rate_limit_per_sec = 5.0;
  c.lastfm_base_url = "https://lastfm.test/2.0/";
  c.spotify_api_url = "https://spotify.test/v1";
  c.spotify_token_url = "https://accounts.test/token";
  return c;
}

}  // namespace

TEST_CASE("rate limiter spaces requests so no one-second window exceeds the rate") {
  ManualClock clock;
  RateLimiter limiter(5.0, clock);
  std::vector<Clock::Duration> sent;
  for (int i = 0; i < 100; ++i) {
    limiter.acquire();
    sent.push_back(clock.now());
    clock.advance(1ms);  // request latency
  }
  for (std::size_t i = 0; i < sent.size(); ++i) {
    std::size_t in_window = 0;
    for (std::size_t j = i; j < sent.size() && sent[j] - sent[i] < 1s; ++j) ++in_window;
    CHECK(in_window <= 5);
  }
  CHECK(sent.back() - sent.front() >= 99 * 200ms);
  CHECK_THROWS_AS(RateLimiter(0.0, clock), ValidationError);
}

TEST_CASE("rate limiter does not sleep when requests are already slow") {
  ManualClock clock;
  RateLimiter limiter(5.0, clock);
  for (int i = 0; i < 10; ++i) {
    limiter.acquire();
    clock.advance(300ms);
  }
  CHECK(clock.sleeps().empty());
}

TEST_CASE("rate limiter is safe under concurrent callers") {
  ManualClock clock;
  RateLimiter limiter(10.0, clock);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 25; ++i) limiter.acquire();
    });
  }
  for (auto& t : threads) t.join();
  CHECK(clock.now() >= 99 * 100ms);
}

TEST_CASE("api session retries 429 and 5xx with exponential backoff") {
  ManualClock clock;
  RateLimiter limiter(1000.0, clock);
  ScriptedTransport transport;
  ApiSession session(transport, limiter, clock);
  HttpRequest req;
  req.url = "https://example.test/";

  SUBCASE("recovers on the third attempt") {
    transport.script = {[] { return HttpResponse{429, ""}; }, [] { return HttpResponse{503, ""}; },
                        [] { return HttpResponse{200, "ok"}; }};
    CHECK(session.send(req).body == "ok");
    const auto sleeps = clock.sleeps();
    // Backoff sleeps are 1 s then 2 s; the limiter adds only tiny waits.
    std::vector<Clock::Duration> backoff;
    for (auto d : sleeps)
      if (d >= 500ms) backoff.push_back(d);
    CHECK(backoff == std::vector<Clock::Duration>{1s, 2s});
    CHECK(session.requests_sent() == 3);
  }
  SUBCASE("gives up after three attempts") {
    for (int i = 0; i < 3; ++i) transport.script.push_back([] { return HttpResponse{500, ""}; });
    CHECK_THROWS_AS(session.send(req), TransportError);
    CHECK(transport.seen.size() == 3);
  }
  SUBCASE("transport failures are retried too") {
    transport.script = {[]() -> HttpResponse { throw TransportError("reset"); }, [] { return HttpResponse{200, "x"}; }};
    CHECK(session.send(req).status == 200);
  }
  SUBCASE("client errors are returned without retrying") {
    transport.script = {[] { return HttpResponse{404, "nope"}; }};
    CHECK(session.send(req).status == 404);
    CHECK(transport.seen.size() == 1);
  }
}

TEST_CASE("url helpers") {
  CHECK(url_encode("a b&c/é") == "a%20b%26c%2F%C3%A9");
  CHECK(make_url("https://x.test/", {{"q", "a b"}, {"n", "1"}}) == "https://x.test/?q=a%20b&n=1");
  CHECK(base64_encode("id:secret") == "aWQ6c2VjcmV0");
  CHECK(base64_encode("") == "");
}

TEST_CASE("record cache is write-once and survives corrupt lines") {
  testing::TempDir dir;
  {
    RecordCache cache(dir.path());
    CHECK(cache.store(EntityKind::features, json{{"track_key", "a — b"}, {"features", nullptr}}));
    CHECK_FALSE(cache.store(EntityKind::features, json{{"track_key", "a — b"}, {"features", 1}}));
    CHECK(cache.load(EntityKind::features, "a — b")->at("features").is_null());
  }
  {
    std::ofstream out(dir / "features.jsonl", std::ios::app);
    out << "{\"track_key\": \"half\n";
  }
  RecordCache reopened(dir.path());
  CHECK(reopened.load_all(EntityKind::features).size() == 1);
  CHECK(reopened.corrupt_lines() == 1);
  CHECK_FALSE(reopened.load(EntityKind::features, "missing").has_value());
}

TEST_CASE("record keys") {
  CHECK(record_key(EntityKind::scrobble, json{{"ts", 5}, {"artist", "A"}, {"track", "B"}}) == "5|a — b");
  CHECK(record_key(EntityKind::artist_tags, json{{"artist", " Brian Eno"}, {"tags", json::array()}}) == "brian eno");
}

TEST_CASE("offline ingest of the small fixture") {
  testing::TempDir dir;
  testing::write_small_fixture(dir / "fixture");
  FixtureSource source(dir / "fixture");
  RecordCache cache(dir / "cache");
  const IngestReport r = ingest(source, cache, kSince, kUntil);
  CHECK(r.fetched == 8);
  CHECK(r.duplicates_removed == 1);
  CHECK(r.skipped_malformed == 1);
  CHECK(r.kept == 6);
  CHECK(r.filtered_no_features == 1);
  CHECK(r.balanced());
  CHECK(r.tracks == 5);
  CHECK(r.tracks_with_features == 4);
  CHECK(r.tracks_artist_fallback == 1);
  CHECK(r.tracks_untagged == 1);
  CHECK(std::filesystem::exists(dir / "cache" / "ingest_report.json"));

  const IngestedData data = load_ingested(dir / "cache");
  CHECK(data.scrobbles.size() == 7);
  const TrackRecord& eno = data.tracks.at("brian eno — an ending");
  REQUIRE(eno.tags.size() == 2);
  CHECK(eno.tags[0].source == TagSource::artist);
  CHECK(data.tracks.at("kelly lee owens — jeanette").tags[0].count == 100);
  CHECK_FALSE(data.tracks.at("unknown — noise").features.has_value());
}

TEST_CASE("ingest range filter and empty ranges") {
  testing::TempDir dir;
  testing::write_small_fixture(dir / "fixture");
  FixtureSource source(dir / "fixture");
  SUBCASE("until == since fetches nothing") {
    RecordCache cache(dir / "c1");
    const IngestReport r = ingest(source, cache, kSince, kSince);
    CHECK(r.fetched == 0);
    CHECK(r.balanced());
  }
  SUBCASE("first day only") {
    RecordCache cache(dir / "c2");
    const IngestReport r = ingest(source, cache, parse_iso_instant("2021-06-01"), parse_iso_instant("2021-06-02"));
    CHECK(r.kept == 4);
    CHECK(r.filtered_no_features == 1);
  }
}

TEST_CASE("a second ingest reuses cached tags and features") {
  testing::TempDir dir;
  testing::write_small_fixture(dir / "fixture");
  FakeWebApis web(dir / "fixture");
  ManualClock clock;
  LiveSource first(live_config(dir / "cache"), web, clock);
  RecordCache cache(dir / "cache");
  ingest(first, cache, kSince, kUntil);
  const std::size_t after_first = web.requests;

  LiveSource second(live_config(dir / "cache"), web, clock);
  RecordCache again(dir / "cache");
  const IngestReport r = ingest(second, again, kSince, kUntil);
  CHECK(r.balanced());
  // Only the scrobble pages are fetched again.
  CHECK(web.requests - after_first == 3);
}

TEST_CASE("live and offline ingestion build byte-identical datasets") {
  testing::TempDir dir;
  testing::write_small_fixture(dir / "fixture");

  FixtureSource offline(dir / "fixture");
  RecordCache offline_cache(dir / "offline");
  const IngestReport a = ingest(offline, offline_cache, kSince, kUntil);

  FakeWebApis web(dir / "fixture");
  web.fail_first = 2;  // transient outage at the start
  ManualClock clock;
  LiveSource live(live_config(dir / "live"), web, clock);
  RecordCache live_cache(dir / "live");
  const IngestReport b = ingest(live, live_cache, kSince, kUntil);

  CHECK(a.to_json() == b.to_json());
  for (const char* file : {"scrobbles.jsonl", "tags.jsonl", "features.jsonl"}) {
    CAPTURE(file);
    CHECK(testing::slurp(dir / "offline" / file) == testing::slurp(dir / "live" / file));
  }

  dataset::BuildOptions opts;
  dataset::write_dataset(dataset::build_dataset(dir / "offline", opts), dir / "ds_offline");
  dataset::write_dataset(dataset::build_dataset(dir / "live", opts), dir / "ds_live");
  for (const char* file : {dataset::kTagsFile, dataset::kFeaturesFile, dataset::kMetaFile}) {
    CAPTURE(file);
    CHECK(testing::slurp(dir / "ds_offline" / file) == testing::slurp(dir / "ds_live" / file));
  }
}

TEST_CASE("audio features are requested in batches of at most 100") {
  testing::TempDir dir;
  std::filesystem::create_directories(dir / "fx");
  std::string scrobbles, features;
  for (int i = 0; i < 250; ++i) {
    const std::string title = "Song " + std::to_string(i);
    scrobbles += json{{"ts", 1620000000 + i}, {"artist", "A"}, {"track", title}}.dump() + "\n";
    features += json{{"track_key", make_track_key("A", title)},
                     {"features", {{"acousticness", 0.1}, {"danceability", 0.5}, {"duration_ms", 1000},
                                   {"energy", 0.5}, {"instrumentalness", 0.0}, {"key", 1}, {"liveness", 0.1},
                                   {"loudness", -5.0}, {"mode", 1}, {"speechiness", 0.1}, {"tempo", 100.0},
                                   {"valence", 0.5}}}}
                    .dump() +
                "\n";
  }
  testing::write_file(dir / "fx" / "scrobbles.jsonl", scrobbles);
  testing::write_file(dir / "fx" / "features.jsonl", features);
  testing::write_file(dir / "fx" / "tags.jsonl", "");
  testing::write_file(dir / "fx" / "artist_tags.jsonl", "");
  FakeWebApis web(dir / "fx", 200);
  ManualClock clock;
  LiveSource live(live_config(dir / "cache"), web, clock);
  RecordCache cache(dir / "cache");
  const IngestReport r = ingest(live, cache, kSince, kUntil);
  CHECK(r.kept == 250);
  CHECK(web.feature_batches == 3);
  CHECK(r.tracks_untagged == 250);
}

TEST_CASE("live mode needs credentials") {
  ApiConfig c = live_config("cache");
  c.spotify_client_secret.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = live_config("cache");
  c.rate_limit_per_sec = -1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("out-of-range remote features are rejected, not kept") {
  testing::TempDir dir;
  testing::write_small_fixture(dir / "fx");
  testing::write_file(dir / "fx" / "features.jsonl",
                      "{\"track_key\":\"bicep — glue\",\"features\":{\"acousticness\":0.1,\"danceability\":1.7,"
                      "\"duration_ms\":1,\"energy\":0.1,\"instrumentalness\":0,\"key\":0,\"liveness\":0,"
                      "\"loudness\":-1,\"mode\":0,\"speechiness\":0,\"tempo\":90,\"valence\":0}}\n");
  FixtureSource source(dir / "fx");
  RecordCache cache(dir / "cache");
  const IngestReport r = ingest(source, cache, kSince, kUntil);
  CHECK(r.features_rejected == 1);
  CHECK(r.kept == 0);
  CHECK(r.balanced());
}
