#include <algorithm>
#include <cmath>
#include <numeric>

#include "momentrec/core/error.hpp"
#include "momentrec/core/format.hpp"
#include "momentrec/pipeline/pipeline.hpp"
#include "momentrec/simd/kernels.hpp"

namespace momentrec::pipeline {
namespace {

std::string hour_window(int hour) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d:00-%d:00", hour, (hour + 1) % 24 == 0 ? 24 : hour + 1);
  return buf;
}

}  // namespace

HourProfile phase1_tag_profile(const MomentsDataset& ds, int hour) {
  if (hour < 0 || hour > 23) throw ValidationError("hour must be in 0..23");
  if (ds.samples.empty()) throw ValidationError("cannot profile an empty dataset");

  HourProfile profile;
  profile.hour = hour;
  profile.tag_strengths.assign(ds.vocabulary.size(), 0.0);
  const auto accumulate = [&](bool any_hour) {
    std::size_t n = 0;
    for (const MomentSample& s : ds.samples) {
      if ((!any_hour && s.key.hour != hour) || s.degenerate()) continue;
      simd::axpy(1.0, s.tag_strengths, profile.tag_strengths);
      ++n;
    }
    if (n > 0) simd::scale(profile.tag_strengths, 1.0 / static_cast<double>(n), profile.tag_strengths);
    return n;
  };

  profile.support = accumulate(false);
  if (profile.support == 0) {
    profile.fallback = true;
    accumulate(true);
  }
  return profile;
}

double phase2_predict(const TrainedRegressor& model, const HourProfile& profile, const TagVocabulary* vocab) {
  if (vocab && !model.vocabulary.empty() && model.vocabulary != vocab->names()) {
    throw ValidationError("vocabulary mismatch between model and dataset");
  }
  return model.predict(profile.tag_strengths);
}

std::vector<Recommendation> phase3_rank(std::span<const LibraryTrack> candidates, double predicted, Feature target,
                                        std::size_t k) {
  std::vector<double> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) values[i] = candidates[i].features.get(target);
  std::vector<double> distances(candidates.size());
  simd::abs_diff(values, predicted, distances);

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto closer = [&](std::size_t a, std::size_t b) {
    if (distances[a] != distances[b]) return distances[a] < distances[b];
    return candidates[a].track_key < candidates[b].track_key;
  };
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), closer);

  std::vector<Recommendation> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const LibraryTrack& t = candidates[order[i]];
    Recommendation r;
    r.track_key = t.track_key;
    r.track_name = t.track_name;
    r.artist_name = t.artist_name;
    r.feature_value = values[order[i]];
    r.distance = distances[order[i]];
    r.rank = static_cast<int>(i + 1);
    r.phase3_rank = r.rank;
    r.play_count = t.play_count;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Recommendation> phase4_rerank(std::vector<Recommendation> recs, double epsilon,
                                          const std::map<std::string, std::size_t>& play_counts) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must be in [0, 1]");
  std::size_t max_plays = 0;
  double max_distance = 0.0;
  for (Recommendation& r : recs) {
    const auto it = play_counts.find(r.track_key);
    r.play_count = it == play_counts.end() ? 0 : it->second;
    max_plays = std::max(max_plays, r.play_count);
    max_distance = std::max(max_distance, r.distance);
  }
  for (Recommendation& r : recs) {
    r.novelty = max_plays == 0 ? 1.0 : 1.0 - static_cast<double>(r.play_count) / static_cast<double>(max_plays);
    r.proximity = max_distance == 0.0 ? 1.0 : 1.0 - r.distance / max_distance;
    r.score = (1.0 - epsilon) * r.proximity + epsilon * r.novelty;
  }
  std::stable_sort(recs.begin(), recs.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.rank < b.rank;
  });
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].rank = static_cast<int>(i + 1);
  return recs;
}

std::vector<std::pair<std::string, double>> top_tags(std::span<const double> strengths, const TagVocabulary& vocab,
                                                     std::size_t n) {
  std::vector<std::size_t> order(strengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t keep = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (strengths[a] != strengths[b]) return strengths[a] > strengths[b];
                      return vocab.name(a) < vocab.name(b);
                    });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < keep; ++i) out.emplace_back(vocab.name(order[i]), strengths[order[i]]);
  return out;
}

PipelineResult run_pipeline(const MomentsDataset& ds, const TrainedRegressor& model, std::span<const LibraryTrack> library,
                            const PipelineRequest& request) {
  if (request.k < 1) throw ValidationError("k must be >= 1");
  if (model.target != ds.target_feature) {
    throw ValidationError("model predicts " + std::string(feature_name(model.target)) + " but the dataset targets " +
                          std::string(feature_name(ds.target_feature)));
  }
  if (library.empty()) throw ValidationError("the candidate library is empty");

  PipelineResult result;
  result.hour = request.hour;
  result.epsilon = request.epsilon;
  result.target = model.target;
  result.model_kind = std::string(models::to_string(model.kind));

  // Phase 1
  const HourProfile profile = phase1_tag_profile(ds, request.hour);
  result.top_tags = top_tags(profile.tag_strengths, ds.vocabulary, kDisplayTags);
  result.profile_support = profile.support;
  result.profile_fallback = profile.fallback;
  {
    std::string text = "Tag strength at " + hour_window(request.hour);
    text += profile.fallback ? " (no plays at this hour; mean profile of all " : " (mean of ";
    text += std::to_string(profile.fallback ? ds.non_degenerate_count() : profile.support) + " moments):";
    for (const auto& [tag, strength] : result.top_tags) text += " " + tag + "=" + format_fixed(strength, 6);
    result.explanations[0] = std::move(text);
  }

  // Phase 2
  const double predicted = phase2_predict(model, profile, &ds.vocabulary);
  result.predicted_features[std::string(feature_name(model.target))] = predicted;
  result.explanations[1] = "The " + result.model_kind + " model maps the " + std::to_string(ds.vocabulary.size()) +
                           "-tag profile to " + std::string(feature_name(model.target)) + " = " +
                           format_general(predicted, 6) + ", the target value for this hour.";

  // Phase 3
  std::vector<Recommendation> ranked = phase3_rank(library, predicted, model.target, request.k);
  {
    std::string text = "Closest " + std::to_string(ranked.size()) + " of " + std::to_string(library.size()) +
                       " tracks by |" + std::string(feature_name(model.target)) + " - " +
                       format_general(predicted, 6) + "|";
    if (!ranked.empty()) {
      text += "; nearest: " + ranked.front().artist_name + " - " + ranked.front().track_name +
              " (distance " + format_fixed(ranked.front().distance, 7) + "), farthest kept: distance " +
              format_fixed(ranked.back().distance, 7);
    }
    result.explanations[2] = std::move(text) + ".";
  }

  // Phase 4
  std::map<std::string, std::size_t> plays;
  for (const Recommendation& r : ranked) plays[r.track_key] = r.play_count;
  result.recommendations = phase4_rerank(std::move(ranked), request.epsilon, plays);
  result.explanations[3] = "epsilon = " + format_general(request.epsilon, 6) + ": score = " +
                           format_general(1.0 - request.epsilon, 6) + " * proximity + " +
                           format_general(request.epsilon, 6) +
                           " * novelty, where proximity = 1 - distance / max distance and novelty = 1 - plays / "
                           "max plays over the ranked tracks.";
  return result;
}

}  // namespace momentrec::pipeline
