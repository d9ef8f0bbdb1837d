#include "momentrec/simulator/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "momentrec/core/audio_features.hpp"
#include "momentrec/core/error.hpp"
#include "momentrec/core/moment_key.hpp"
#include "momentrec/ingestion/cache.hpp"
#include "momentrec/ingestion/track_record.hpp"

namespace momentrec::simulator {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> Regime::hours() const {
  std::vector<int> out;
  for (int h = hour_start; h != hour_end; h = (h + 1) % 24) {
    out.push_back(h);
    if (out.size() == 24) break;
  }
  return out;
}

void ListenerSpec::validate() const {
  if (plays_total < 0) throw ValidationError("plays_total must be >= 0");
  if (tracks_per_regime < 1) throw ValidationError("tracks_per_regime must be >= 1");
  if (tracks_per_artist < 1) throw ValidationError("tracks_per_artist must be >= 1");
  if (span_days < 1) throw ValidationError("span_days must be >= 1");
  if (!(plays_per_session >= 1.0)) throw ValidationError("plays_per_session must be >= 1");
  if (!(artist_fallback_fraction >= 0.0 && artist_fallback_fraction <= 1.0) ||
      !(missing_features_fraction >= 0.0 && missing_features_fraction <= 1.0)) {
    throw ValidationError("fractions must be in [0, 1]");
  }
  if (noise_tags.pool_size < 0 || noise_tags.per_track < 0 || noise_tags.per_track > noise_tags.pool_size ||
      noise_tags.count_min < 1 || noise_tags.count_max > 100 || noise_tags.count_min > noise_tags.count_max) {
    throw ValidationError("bad noise_tags settings");
  }
  parse_iso_instant(start_date);
  if (plays_total > 0 && regimes.empty()) throw ValidationError("at least one regime is required");

  std::vector<bool> used(24, false);
  for (const Regime& r : regimes) {
    const bool whole_day = r.hour_start == 0 && r.hour_end == 24;
    if (r.hour_start < 0 || r.hour_start > 23 || r.hour_end < 0 || r.hour_end > 24 ||
        (r.hour_start == r.hour_end % 24 && !whole_day)) {
      throw ValidationError("regime '" + r.name + "' has a bad hour range");
    }
    for (int h : r.hours()) {
      if (used[h]) throw ValidationError("regime hours overlap at hour " + std::to_string(h));
      used[h] = true;
    }
    if (!(r.weight > 0.0)) throw ValidationError("regime weights must be > 0");
    if (!(r.danceability.stddev >= 0.0)) throw ValidationError("regime stds must be >= 0");
    if (r.tags.empty()) throw ValidationError("regime '" + r.name + "' has no tags");
    for (const TagDraw& t : r.tags) {
      if (t.count_min < 1 || t.count_max > 100 || t.count_min > t.count_max) {
        throw ValidationError("bad tag count range for '" + t.tag + "'");
      }
    }
  }
}

ListenerSpec spec_from_json(const json& j) {
  ListenerSpec s;
  try {
    s.seed = j.value("seed", s.seed);
    s.plays_total = j.value("plays_total", s.plays_total);
    s.tracks_per_regime = j.value("tracks_per_regime", s.tracks_per_regime);
    s.tracks_per_artist = j.value("tracks_per_artist", s.tracks_per_artist);
    s.start_date = j.value("start_date", s.start_date);
    s.span_days = j.value("span_days", s.span_days);
    s.plays_per_session = j.value("plays_per_session", s.plays_per_session);
    s.artist_fallback_fraction = j.value("artist_fallback_fraction", s.artist_fallback_fraction);
    s.missing_features_fraction = j.value("missing_features_fraction", s.missing_features_fraction);
    if (j.contains("noise_tags")) {
      const json& n = j.at("noise_tags");
      s.noise_tags.pool_size = n.value("pool_size", 0);
      s.noise_tags.per_track = n.value("per_track", 0);
      s.noise_tags.count_min = n.value("count_min", 1);
      s.noise_tags.count_max = n.value("count_max", 10);
    }
    for (const json& r : j.value("regimes", json::array())) {
      Regime regime;
      regime.name = r.at("name").get<std::string>();
      regime.hour_start = r.at("hours").at(0).get<int>();
      regime.hour_end = r.at("hours").at(1).get<int>();
      regime.weight = r.value("weight", 1.0);
      for (const json& t : r.at("tags")) {
        regime.tags.push_back({t.at("tag").get<std::string>(), t.value("count_min", 1), t.value("count_max", 100)});
      }
      regime.danceability = {r.at("danceability").at("mean").get<double>(),
                             r.at("danceability").value("std", 0.0)};
      s.regimes.push_back(std::move(regime));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad listener spec: ") + e.what());
  }
  s.validate();
  return s;
}

json spec_to_json(const ListenerSpec& s) {
  json regimes = json::array();
  for (const Regime& r : s.regimes) {
    json tags = json::array();
    for (const TagDraw& t : r.tags) tags.push_back({{"tag", t.tag}, {"count_min", t.count_min}, {"count_max", t.count_max}});
    regimes.push_back({{"name", r.name},
                       {"hours", {r.hour_start, r.hour_end}},
                       {"weight", r.weight},
                       {"tags", tags},
                       {"danceability", {{"mean", r.danceability.mean}, {"std", r.danceability.stddev}}}});
  }
  return {{"seed", s.seed},
          {"plays_total", s.plays_total},
          {"tracks_per_regime", s.tracks_per_regime},
          {"tracks_per_artist", s.tracks_per_artist},
          {"start_date", s.start_date},
          {"span_days", s.span_days},
          {"plays_per_session", s.plays_per_session},
          {"noise_tags",
           {{"pool_size", s.noise_tags.pool_size},
            {"per_track", s.noise_tags.per_track},
            {"count_min", s.noise_tags.count_min},
            {"count_max", s.noise_tags.count_max}}},
          {"artist_fallback_fraction", s.artist_fallback_fraction},
          {"missing_features_fraction", s.missing_features_fraction},
          {"regimes", regimes}};
}

ListenerSpec load_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read listener spec " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("listener spec " + path.string() + " is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

ListenerSpec default_spec() {
  ListenerSpec s;
  s.seed = 20190101;
  s.plays_total = 40000;
  s.tracks_per_regime = 2000;
  s.tracks_per_artist = 4;
  s.start_date = "2015-01-01";
  s.span_days = 5 * 365;
  s.plays_per_session = 4.0;
  s.noise_tags = {1500, 6, 1, 12};
  s.artist_fallback_fraction = 0.05;
  s.missing_features_fraction = 0.02;
  // Evening tracks carry one night tag and one day tag yet are the most
  // danceable, so no weighting of tag shares can fit all three regimes.
  // Enough tracks that noise tags cannot single out a track.
  s.regimes = {
      {"night", 22, 6, 0.4, {{"relaxing", 10, 100}, {"ambient", 10, 100}}, {0.35, 0.05}},
      {"day", 8, 20, 0.4, {{"electronic", 10, 100}, {"dance", 10, 100}}, {0.75, 0.05}},
      {"evening", 20, 22, 0.2, {{"ambient", 10, 100}, {"dance", 10, 100}}, {0.9, 0.03}},
  };
  return s;
}

namespace {

struct SimTrack {
  std::string artist;
  std::string title;
  std::vector<TagAssignment> tags;
  bool artist_fallback = false;
  std::optional<AudioFeatures> features;
};

double round_to(double v, int decimals) {
  const double p = std::pow(10.0, decimals);
  return std::round(v * p) / p;
}

std::string noise_tag_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "noise-%04d", i);
  return buf;
}

std::string numbered(const std::string& prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, " %03d", i);
  return prefix + buf;
}

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

AudioFeatures draw_features(std::mt19937_64& rng, const Normal& dance) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AudioFeatures::Fields f;
  std::normal_distribution<double> d(dance.mean, dance.stddev > 0 ? dance.stddev : 1e-300);
  f.danceability = round_to(std::clamp(dance.stddev > 0 ? d(rng) : dance.mean, 0.0, 1.0), 3);
  f.acousticness = round_to(unit(rng), 3);
  f.duration_ms = std::uniform_int_distribution<long long>(120000, 360000)(rng);
  f.energy = round_to(unit(rng), 3);
  f.instrumentalness = round_to(unit(rng), 3);
  f.key = std::uniform_int_distribution<int>(0, 11)(rng);
  f.liveness = round_to(unit(rng), 3);
  f.loudness = round_to(-30.0 + 28.0 * unit(rng), 3);
  f.mode = std::uniform_int_distribution<int>(0, 1)(rng);
  f.speechiness = round_to(0.3 * unit(rng), 3);
  f.tempo = round_to(60.0 + 120.0 * unit(rng), 3);
  f.valence = round_to(unit(rng), 3);
  return AudioFeatures(f);
}

std::vector<TagAssignment> draw_tags(std::mt19937_64& rng, const std::vector<TagDraw>& draws, const NoiseTags& noise) {
  std::vector<TagAssignment> tags;
  for (const TagDraw& t : draws) {
    tags.push_back(TagAssignment::make(t.tag, std::uniform_int_distribution<int>(t.count_min, t.count_max)(rng)));
  }
  if (noise.per_track > 0) {
    std::vector<int> pool(static_cast<std::size_t>(noise.pool_size));
    for (int i = 0; i < noise.pool_size; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> picked;
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), noise.per_track, rng);
    std::uniform_int_distribution<int> count(noise.count_min, noise.count_max);
    for (int i : picked) tags.push_back(TagAssignment::make(noise_tag_name(i), count(rng)));
  }
  return dedupe_tags(std::move(tags));
}

void write_lines(const fs::path& path, const std::vector<json>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const json& j : lines) out << j.dump() << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

GenerationSummary generate_history(const ListenerSpec& spec, const fs::path& out_dir) {
  spec.validate();
  fs::create_directories(out_dir);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GenerationSummary summary;
  std::vector<std::vector<SimTrack>> catalog(spec.regimes.size());
  std::vector<json> artist_tag_lines;
  for (std::size_t r = 0; r < spec.regimes.size(); ++r) {
    const Regime& regime = spec.regimes[r];
    bool artist_fallback = false;
    for (int i = 0; i < spec.tracks_per_regime; ++i) {
      const int artist_no = i / spec.tracks_per_artist + 1;
      SimTrack t;
      t.artist = numbered(capitalized(regime.name) + " Artist", artist_no);
      t.title = numbered(capitalized(regime.name) + " Song", i + 1);
      if (i % spec.tracks_per_artist == 0) {
        artist_fallback = unit(rng) < spec.artist_fallback_fraction;
        if (artist_fallback) {
          json tags = ingestion::tags_to_json(draw_tags(rng, regime.tags, spec.noise_tags));
          for (json& tag : tags) tag["source"] = "artist";
          artist_tag_lines.push_back({{"artist", t.artist}, {"tags", tags}});
        }
      }
      t.artist_fallback = artist_fallback;
      if (!artist_fallback) t.tags = draw_tags(rng, regime.tags, spec.noise_tags);
      const AudioFeatures features = draw_features(rng, regime.danceability);
      if (unit(rng) >= spec.missing_features_fraction) t.features = features;
      summary.artist_fallback_tracks += t.artist_fallback ? 1 : 0;
      summary.featureless_tracks += t.features ? 0 : 1;
      catalog[r].push_back(std::move(t));
    }
  }
  summary.tracks = static_cast<std::size_t>(spec.tracks_per_regime) * spec.regimes.size();

  std::vector<double> weights;
  for (const Regime& r : spec.regimes) weights.push_back(r.weight);
  const Instant start = parse_iso_instant(spec.start_date);
  const double p = 1.0 / spec.plays_per_session;

  struct Play {
    long long ts;
    const SimTrack* track;
  };
  std::vector<Play> plays;
  plays.reserve(static_cast<std::size_t>(spec.plays_total));
  if (!spec.regimes.empty()) {
    std::discrete_distribution<std::size_t> pick_regime(weights.begin(), weights.end());
    std::uniform_int_distribution<int> pick_day(0, spec.span_days - 1);
    std::uniform_int_distribution<int> pick_second(0, 3599);
    std::geometric_distribution<int> extra_plays(p);
    while (plays.size() < static_cast<std::size_t>(spec.plays_total)) {
      const std::size_t r = pick_regime(rng);
      const std::vector<int> hours = spec.regimes[r].hours();
      const int hour = hours[std::uniform_int_distribution<std::size_t>(0, hours.size() - 1)(rng)];
      const long long hour_start =
          start.time_since_epoch().count() + (static_cast<long long>(pick_day(rng)) * 24 + hour) * 3600;
      const int length = 1 + extra_plays(rng);
      for (int i = 0; i < length && plays.size() < static_cast<std::size_t>(spec.plays_total); ++i) {
        // Squaring skews plays toward the first tracks of the regime.
        const double u = unit(rng);
        const auto index = static_cast<std::size_t>(u * u * static_cast<double>(catalog[r].size()));
        plays.push_back({hour_start + pick_second(rng), &catalog[r][std::min(index, catalog[r].size() - 1)]});
      }
    }
  }
  std::stable_sort(plays.begin(), plays.end(), [](const Play& a, const Play& b) { return a.ts < b.ts; });

  std::vector<json> scrobble_lines;
  for (const Play& play : plays) {
    scrobble_lines.push_back({{"ts", play.ts}, {"artist", play.track->artist}, {"track", play.track->title}});
  }
  std::vector<json> tag_lines;
  std::vector<json> feature_lines;
  for (const auto& regime_tracks : catalog) {
    for (const SimTrack& t : regime_tracks) {
      const std::string key = make_track_key(t.artist, t.title);
      if (!t.artist_fallback) tag_lines.push_back({{"track_key", key}, {"tags", ingestion::tags_to_json(t.tags)}});
      feature_lines.push_back(
          {{"track_key", key}, {"features", t.features ? ingestion::features_to_json(*t.features) : json(nullptr)}});
    }
  }

  using ingestion::EntityKind;
  write_lines(out_dir / ingestion::file_name(EntityKind::scrobble), scrobble_lines);
  write_lines(out_dir / ingestion::file_name(EntityKind::track_tags), tag_lines);
  write_lines(out_dir / ingestion::file_name(EntityKind::artist_tags), artist_tag_lines);
  write_lines(out_dir / ingestion::file_name(EntityKind::features), feature_lines);
  summary.scrobbles = plays.size();
  return summary;
}

}  // namespace momentrec::simulator
