#include "scan.hpp"

namespace cjtrans::corpus::detail {

std::string blank_comments_and_literals(std::string_view code) {
    std::string out(code);
    const auto blank = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to && k < out.size(); ++k)
            if (out[k] != '\n') out[k] = ' ';
    };
    std::size_t i = 0;
    while (i < code.size()) {
        if (code.substr(i, 2) == "//") {
            const auto e = code.find('\n', i);
            const auto end = e == std::string_view::npos ? code.size() : e;
            blank(i, end);
            i = end;
        } else if (code.substr(i, 2) == "/*") {
            const auto e = code.find("*/", i + 2);
            const auto end = e == std::string_view::npos ? code.size() : e + 2;
            blank(i, end);
            i = end;
        } else if (code.substr(i, 3) == "\"\"\"") {
            const auto e = code.find("\"\"\"", i + 3);
            const auto end = e == std::string_view::npos ? code.size() : e;
            blank(i + 3, end);
            i = e == std::string_view::npos ? code.size() : e + 3;
        } else if (code[i] == '"' || code[i] == '\'') {
            const char q = code[i];
            std::size_t j = i + 1;
            while (j < code.size() && code[j] != q && code[j] != '\n') j += code[j] == '\\' ? 2 : 1;
            const auto end = std::min(j, code.size());
            blank(i + 1, end);
            i = end < code.size() && code[end] == q ? end + 1 : end;
        } else {
            ++i;
        }
    }
    return out;
}

} // namespace cjtrans::corpus::detail
