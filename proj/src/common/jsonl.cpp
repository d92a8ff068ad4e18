#include "cjtrans/jsonl.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

namespace cjtrans::jsonl {

std::vector<Json> parse(std::string_view content, std::string_view origin) {
    std::vector<Json> records;
    std::size_t line_no = 0;
    for (const auto line : text::split_lines(content)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            records.push_back(Json::parse(line));
        } catch (const Json::parse_error& e) {
            throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<Json> read(const std::string& path) {
    return parse(text::read_file(path), path);
}

std::string dump(const std::vector<Json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.dump(-1, ' ', false, Json::error_handler_t::replace);
        out.push_back('\n');
    }
    return out;
}

void write(const std::string& path, const std::vector<Json>& records) {
    text::write_file_atomic(path, dump(records));
}

} // namespace cjtrans::jsonl
