#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace admg {

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_roundtrip(double value);

/// `value` with 12 significant digits.
std::string format_fixed12(double value);

double parse_double(std::string_view text);

}  // namespace admg
