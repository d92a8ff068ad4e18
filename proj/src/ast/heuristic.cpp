#include "cjtrans/ast/summary.hpp"

#include <cctype>
#include <string_view>
#include <unordered_map>

namespace cjtrans::ast {

namespace {

const std::unordered_map<std::string_view, std::string_view>& keyword_categories() {
    static const std::unordered_map<std::string_view, std::string_view> map = {
        {"class", "class_declaration"},     {"struct", "class_declaration"},
        {"interface", "class_declaration"}, {"enum", "class_declaration"},
        {"record", "class_declaration"},    {"func", "method_declaration"},
        {"init", "constructor_declaration"}, {"if", "if_statement"},
        {"for", "for_statement"},           {"while", "while_statement"},
        {"do", "do_statement"},             {"switch", "switch_expression"},
        {"match", "switch_expression"},     {"try", "try_statement"},
        {"catch", "catch_clause"},          {"return", "return_statement"},
        {"throw", "throw_statement"},
    };
    return map;
}

bool ident_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || u >= 0x80;
}

} // namespace

std::vector<std::string> heuristic_structure(std::string_view code) {
    std::vector<std::string> out;
    bool awaiting_params = false;
    std::size_t i = 0;
    const std::size_t n = code.size();
    while (i < n) {
        const char c = code[i];
        // Comments and string/char literals carry no structure.
        if (c == '/' && i + 1 < n && code[i + 1] == '/') {
            const auto nl = code.find('\n', i);
            i = nl == std::string_view::npos ? n : nl;
            continue;
        }
        if (c == '/' && i + 1 < n && code[i + 1] == '*') {
            const auto close = code.find("*/", i + 2);
            i = close == std::string_view::npos ? n : close + 2;
            continue;
        }
        if (c == '"' || c == '\'') {
            ++i;
            while (i < n && code[i] != c) i += code[i] == '\\' ? 2 : 1;
            ++i;
            continue;
        }
        if (ident_char(c) && !std::isdigit(static_cast<unsigned char>(c))) {
            const auto start = i;
            while (i < n && ident_char(code[i])) ++i;
            const auto word = code.substr(start, i - start);
            if (const auto it = keyword_categories().find(word); it != keyword_categories().end()) {
                out.emplace_back(it->second);
                awaiting_params = it->second == "method_declaration" || it->second == "constructor_declaration";
            }
            continue;
        }
        if (c == '(' && awaiting_params) {
            out.emplace_back("formal_parameters");
            awaiting_params = false;
        } else if (c == '{') {
            out.emplace_back("block");
            awaiting_params = false;
        } else if ((c == '=' || c == '-') && i + 1 < n && code[i + 1] == '>') {
            out.emplace_back("lambda_expression");
            ++i;
        }
        ++i;
    }
    return out;
}

} // namespace cjtrans::ast
