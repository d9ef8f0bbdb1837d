#pragma once

#include <vector>

#include "momentrec/core/audio_features.hpp"
#include "momentrec/core/moment_key.hpp"

namespace momentrec {

inline constexpr double kMomentMass = 100.0;

// One Year-Month-Day-Hour row. tag_strengths sums to 100, or is all-zero for a
// degenerate moment (plays present but no vocabulary tag seen). features holds
// per-interval means, so key and mode are averages rather than categories.
struct MomentSample {
  MomentKey key;
  std::vector<double> tag_strengths;
  FeatureRow features{};

  bool degenerate() const;

  friend bool operator==(const MomentSample&, const MomentSample&) = default;
};

}  // namespace momentrec
