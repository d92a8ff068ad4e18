#pragma once

#include <string>
#include <string_view>

namespace cjtrans::corpus::detail {

/// Copy of Cangjie source with comment text and string/char literal contents
/// replaced by spaces. Quotes and newlines are kept, so offsets and line
/// numbers are unchanged.
std::string blank_comments_and_literals(std::string_view code);

} // namespace cjtrans::corpus::detail
