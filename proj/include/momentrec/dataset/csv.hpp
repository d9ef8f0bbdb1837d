#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace momentrec::dataset::csv {

// RFC 4180 field quoting: wrap in quotes, double embedded quotes.
std::string quote(std::string_view field);

// Splits one CSV line (no embedded newlines) into unquoted fields.
std::vector<std::string> split_line(std::string_view line);

}  // namespace momentrec::dataset::csv
