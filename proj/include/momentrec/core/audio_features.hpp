#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace momentrec {

// Canonical column order of the 12 audio descriptors (alphabetical, as
// returned by the audio-features endpoint and written to the features CSV).
enum class Feature : std::size_t {
  acousticness,
  danceability,
  duration_ms,
  energy,
  instrumentalness,
  key,
  liveness,
  loudness,
  mode,
  speechiness,
  tempo,
  valence,
};

inline constexpr std::size_t kFeatureCount = 12;

using FeatureRow = std::array<double, kFeatureCount>;

struct FeatureRange {
  double lo;
  double hi;
  bool lo_exclusive = false;
};

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);
const std::array<Feature, kFeatureCount>& all_features();

// Valid range of a single track's descriptor.
FeatureRange feature_range(Feature f);

// Clamps a model prediction into the descriptor's valid range.
double clamp_to_range(Feature f, double value);

inline constexpr std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }

// Per-track descriptors. Construction validates every range; out-of-range
// input throws ValidationError so bad records never reach the dataset.
class AudioFeatures {
 public:
  struct Fields {
    double acousticness = 0;
    double danceability = 0;
    long long duration_ms = 1;
    double energy = 0;
    double instrumentalness = 0;
    int key = 0;
    double liveness = 0;
    double loudness = 0;
    int mode = 0;
    double speechiness = 0;
    double tempo = 120;
    double valence = 0;
  };

  explicit AudioFeatures(const Fields& fields);

  const Fields& fields() const { return fields_; }
  double get(Feature f) const;
  FeatureRow as_row() const;

  friend bool operator==(const AudioFeatures& a, const AudioFeatures& b) {
    return a.as_row() == b.as_row();
  }

 private:
  Fields fields_;
};

}  // namespace momentrec
