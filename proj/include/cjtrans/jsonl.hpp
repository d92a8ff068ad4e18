#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::jsonl {

using Json = nlohmann::ordered_json;

/// Parses line-delimited JSON. Blank lines are skipped; a malformed line
/// raises FormatError naming the line number.
std::vector<Json> parse(std::string_view content, std::string_view origin = "<memory>");

std::vector<Json> read(const std::string& path);

/// One compact record per line, each terminated by '\n'.
std::string dump(const std::vector<Json>& records);

void write(const std::string& path, const std::vector<Json>& records);

} // namespace cjtrans::jsonl
