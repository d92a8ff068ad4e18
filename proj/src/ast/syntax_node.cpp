#include "cjtrans/ast/syntax_node.hpp"

#include <array>

namespace cjtrans::ast {

std::size_t count_nodes(const SyntaxNode& root) {
    std::size_t n = 1;
    for (const auto& c : root.children) n += count_nodes(c);
    return n;
}

std::size_t count_internal_nodes(const SyntaxNode& root) {
    if (root.is_terminal) return 0;
    std::size_t n = 1;
    for (const auto& c : root.children) n += count_internal_nodes(c);
    return n;
}

bool contains_error(const SyntaxNode& root) {
    if (root.is_error) return true;
    for (const auto& c : root.children) {
        if (contains_error(c)) return true;
    }
    return false;
}

bool is_declaration_category(std::string_view category) {
    static constexpr std::array<std::string_view, 7> kinds = {
        "class_declaration",  "interface_declaration",   "enum_declaration",
        "record_declaration", "annotation_type_declaration", "method_declaration",
        "constructor_declaration",
    };
    for (const auto k : kinds) {
        if (k == category) return true;
    }
    return false;
}

bool contains_declaration(const SyntaxNode& root) {
    if (!root.is_error && is_declaration_category(root.category)) return true;
    for (const auto& c : root.children) {
        if (contains_declaration(c)) return true;
    }
    return false;
}

namespace {

void write_sexp(const SyntaxNode& node, std::string& out) {
    out += '(';
    out += node.category;
    for (const auto& c : node.children) {
        if (!c.is_named) continue;
        out += ' ';
        write_sexp(c, out);
    }
    out += ')';
}

} // namespace

std::string to_sexp(const SyntaxNode& root) {
    std::string out;
    write_sexp(root, out);
    return out;
}

} // namespace cjtrans::ast
