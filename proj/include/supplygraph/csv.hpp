#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace supplygraph::csv {

/// Quotes a field per RFC 4180 when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Joins already-unescaped fields into one LF-terminated record.
std::string row(const std::vector<std::string>& fields);

/// Parses a whole CSV document (RFC 4180, LF or CRLF). Throws MalformedInput
/// on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace supplygraph::csv
