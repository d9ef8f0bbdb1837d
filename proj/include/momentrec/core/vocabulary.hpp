#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace momentrec {

// Ordered tag names; position i is column i of every tag-strength vector.
class TagVocabulary {
 public:
  TagVocabulary() = default;
  // Throws ValidationError on duplicate or empty names.
  explicit TagVocabulary(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view tag) const;

  friend bool operator==(const TagVocabulary& a, const TagVocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace momentrec
