#include "momentrec/core/audio_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "momentrec/core/error.hpp"

namespace momentrec {
namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames{
    "acousticness", "danceability", "duration_ms", "energy",      "instrumentalness", "key",
    "liveness",     "loudness",     "mode",        "speechiness", "tempo",            "valence",
};

constexpr double kInf = std::numeric_limits<double>::infinity();

void check(Feature f, double value) {
  const FeatureRange r = feature_range(f);
  const bool below = r.lo_exclusive ? !(value > r.lo) : !(value >= r.lo);
  if (!std::isfinite(value) || below || value > r.hi) {
    throw ValidationError("audio feature " + std::string(feature_name(f)) +
                          " out of range: " + std::to_string(value));
  }
}

}  // namespace

std::string_view feature_name(Feature f) { return kNames[index_of(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

const std::array<Feature, kFeatureCount>& all_features() {
  static const auto features = [] {
    std::array<Feature, kFeatureCount> out{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = static_cast<Feature>(i);
    return out;
  }();
  return features;
}

FeatureRange feature_range(Feature f) {
  switch (f) {
    case Feature::loudness:
      return {-60.0, 0.0};
    case Feature::tempo:
      return {0.0, kInf, true};
    case Feature::duration_ms:
      return {0.0, kInf, true};
    case Feature::key:
      return {0.0, 11.0};
    case Feature::mode:
      return {0.0, 1.0};
    default:
      return {0.0, 1.0};
  }
}

double clamp_to_range(Feature f, double value) {
  const FeatureRange r = feature_range(f);
  return std::clamp(value, r.lo, r.hi);
}

AudioFeatures::AudioFeatures(const Fields& fields) : fields_(fields) {
  for (Feature f : all_features()) check(f, get(f));
  if (fields.mode != 0 && fields.mode != 1) {
    throw ValidationError("audio feature mode must be 0 or 1");
  }
}

double AudioFeatures::get(Feature f) const {
  switch (f) {
    case Feature::acousticness: return fields_.acousticness;
    case Feature::danceability: return fields_.danceability;
    case Feature::duration_ms: return static_cast<double>(fields_.duration_ms);
    case Feature::energy: return fields_.energy;
    case Feature::instrumentalness: return fields_.instrumentalness;
    case Feature::key: return fields_.key;
    case Feature::liveness: return fields_.liveness;
    case Feature::loudness: return fields_.loudness;
    case Feature::mode: return fields_.mode;
    case Feature::speechiness: return fields_.speechiness;
    case Feature::tempo: return fields_.tempo;
    case Feature::valence: return fields_.valence;
  }
  return 0.0;
}

FeatureRow AudioFeatures::as_row() const {
  FeatureRow row{};
  for (Feature f : all_features()) row[index_of(f)] = get(f);
  return row;
}

}  // namespace momentrec
