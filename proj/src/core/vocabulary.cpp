#include "momentrec/core/vocabulary.hpp"

#include "momentrec/core/error.hpp"

namespace momentrec {

TagVocabulary::TagVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ValidationError("empty tag name in vocabulary");
    if (!index_.emplace(names_[i], i).second) {
      throw ValidationError("duplicate tag in vocabulary: " + names_[i]);
    }
  }
}

std::optional<std::size_t> TagVocabulary::index_of(std::string_view tag) const {
  const auto it = index_.find(std::string(tag));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace momentrec
