#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace patchsim::detail {

/// Splits one RFC 4180 record. Returns false on an unterminated quote.
bool split_csv_line(std::string_view line, std::vector<std::string>& fields);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

std::string trim(std::string_view s);

std::vector<std::string> split_list(std::string_view s, char sep);

}  // namespace patchsim::detail
