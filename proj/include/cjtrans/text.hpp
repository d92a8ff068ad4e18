#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::text {

bool is_valid_utf8(std::string_view s);

/// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view s);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Splits on '\n'; a trailing newline does not produce an empty final line.
std::vector<std::string_view> split_lines(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle);
bool starts_with_word(std::string_view line, std::string_view word);

/// Collapses every whitespace run to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Strips trailing whitespace from every line and drops trailing newlines.
std::string normalize_output(std::string_view s);

/// Lower-case hex SHA-256 of the exact bytes.
std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::string& path);

/// Writes via a sibling temporary file and rename(2), so readers never see a
/// partially written file.
void write_file_atomic(const std::string& path, std::string_view content);

} // namespace cjtrans::text
