#include <algorithm>
#include <cstdio>

#include "momentrec/core/format.hpp"
#include "momentrec/pipeline/pipeline.hpp"

namespace momentrec::pipeline {
namespace {

std::string two_digit_hour(int hour) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:00", hour);
  return buf;
}

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
}

}  // namespace

std::string render_report(const PipelineResult& r, const std::string& clock_text) {
  const std::string target(feature_name(r.target));
  std::string out;

  out += "PHASE 1: Compute Last.fm Tags\n";
  out += "  · Current Time: " + (clock_text.empty() ? two_digit_hour(r.hour) : clock_text) + "\n";
  out += "  · Tag strength at " + std::to_string(r.hour) + ":00-" + std::to_string(r.hour + 1) + ":00\n";
  if (r.profile_fallback) out += "  · No plays at this hour; showing the mean profile of all moments\n";
  std::string names = "    |";
  std::string values = "    |";
  for (const auto& [tag, strength] : r.top_tags) {
    const std::string v = format_fixed(strength, 6);
    const std::size_t w = std::max(tag.size(), v.size());
    names += " " + pad(tag, w) + " |";
    values += " " + pad(v, w) + " |";
  }
  out += names + "\n" + values + "\n\n";

  out += "PHASE 2: Predict Spotify Features\n";
  for (const auto& [name, value] : r.predicted_features) {
    out += "  · " + capitalized(name) + ": " + format_general(value, 6) + "\n";
  }
  out += "\n";

  // Phase 3 lists tracks in closeness order; phase 4 shows the re-ranked list.
  std::vector<const Recommendation*> by_distance;
  for (const Recommendation& rec : r.recommendations) by_distance.push_back(&rec);
  std::sort(by_distance.begin(), by_distance.end(),
            [](const Recommendation* a, const Recommendation* b) { return a->phase3_rank < b->phase3_rank; });

  out += "PHASE 3: Ranking - Closest Tracks\n";
  for (const Recommendation* rec : by_distance) {
    out += "  " + std::to_string(rec->phase3_rank) + ". " + rec->artist_name + " - " + rec->track_name + "\n";
    out += "     · " + target + ": " + format_general(rec->feature_value, 6) + "\n";
    out += "     · distance: " + format_fixed(rec->distance, 7) + "\n";
  }
  out += "\n";

  out += "PHASE 4: Exploration Re-ranking\n";
  out += "  · epsilon: " + format_general(r.epsilon, 6) + "\n";
  for (const Recommendation& rec : r.recommendations) {
    out += "  " + std::to_string(rec.rank) + ". " + rec.artist_name + " - " + rec.track_name + "\n";
    out += "     · score: " + format_fixed(rec.score, 6) + " (proximity " + format_fixed(rec.proximity, 6) +
           ", novelty " + format_fixed(rec.novelty, 6) + ", plays " + std::to_string(rec.play_count) + ")\n";
  }
  return out;
}

nlohmann::json to_json(const PipelineResult& r) {
  nlohmann::json j;
  j["hour"] = r.hour;
  j["top_tags"] = nlohmann::json::array();
  for (const auto& [tag, strength] : r.top_tags) j["top_tags"].push_back({{"tag", tag}, {"strength", strength}});
  j["profile_support"] = r.profile_support;
  j["profile_fallback"] = r.profile_fallback;
  j["model_kind"] = r.model_kind;
  j["target_feature"] = std::string(feature_name(r.target));
  j["predicted_features"] = r.predicted_features;
  j["epsilon"] = r.epsilon;
  j["recommendations"] = nlohmann::json::array();
  for (const Recommendation& rec : r.recommendations) {
    j["recommendations"].push_back({{"rank", rec.rank},
                                    {"phase3_rank", rec.phase3_rank},
                                    {"track_key", rec.track_key},
                                    {"artist", rec.artist_name},
                                    {"track", rec.track_name},
                                    {"feature_value", rec.feature_value},
                                    {"distance", rec.distance},
                                    {"play_count", rec.play_count},
                                    {"proximity", rec.proximity},
                                    {"novelty", rec.novelty},
                                    {"score", rec.score}});
  }
  j["explanations"] = {{"phase1", r.explanations[0]},
                       {"phase2", r.explanations[1]},
                       {"phase3", r.explanations[2]},
                       {"phase4", r.explanations[3]}};
  return j;
}

nlohmann::json to_json(const HourProfile& profile, const TagVocabulary& vocab, std::size_t top_n) {
  nlohmann::json j;
  j["hour"] = profile.hour;
  j["support"] = profile.support;
  j["fallback"] = profile.fallback;
  j["tags"] = nlohmann::json::array();
  for (const auto& [tag, strength] : top_tags(profile.tag_strengths, vocab, top_n)) {
    j["tags"].push_back({{"tag", tag}, {"strength", strength}});
  }
  return j;
}

}  // namespace momentrec::pipeline
