#include "momentrec/dataset/csv.hpp"

#include "momentrec/core/error.hpp"

namespace momentrec::dataset::csv {

std::string quote(std::string_view field) {
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      if (!current.empty() || was_quoted) throw FormatError("stray quote in CSV field");
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
      was_quoted = false;
    } else {
      if (was_quoted) throw FormatError("text after closing quote in CSV field");
      current.push_back(c);
    }
  }
  if (in_quotes) throw FormatError("unterminated quoted CSV field");
  fields.push_back(std::move(current));
  return fields;
}

}  // namespace momentrec::dataset::csv
