#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bisnorm {

// Splits text into rows of comma-separated fields. Fields are trimmed;
// blank lines are skipped; CRLF endings are accepted. No quoting support.
std::vector<std::vector<std::string>> split_csv_lines(std::string_view text);

// Parses a whole field as a finite decimal real; throws ParseError otherwise.
double parse_real(std::string_view field);

}  // namespace bisnorm
