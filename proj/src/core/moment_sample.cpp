#include "momentrec/core/moment_sample.hpp"

#include <algorithm>

namespace momentrec {

bool MomentSample::degenerate() const {
  return std::all_of(tag_strengths.begin(), tag_strengths.end(), [](double v) { return v == 0.0; });
}

}  // namespace momentrec
