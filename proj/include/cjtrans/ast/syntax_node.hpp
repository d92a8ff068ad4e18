#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::ast {

struct Span {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

/// One node of a concrete parse tree. Terminal nodes (tokens) have no children.
struct SyntaxNode {
    std::string category;
    std::vector<SyntaxNode> children;
    bool is_terminal = true;
    bool is_named = false;
    /// Parser error recovery node (ERROR) or a token inserted as MISSING.
    bool is_error = false;
    Span span;
};

std::size_t count_nodes(const SyntaxNode& root);
std::size_t count_internal_nodes(const SyntaxNode& root);
bool contains_error(const SyntaxNode& root);

/// Node kinds that count as declarations for "is this source usable" checks.
bool is_declaration_category(std::string_view category);
bool contains_declaration(const SyntaxNode& root);

/// S-expression of the named nodes, matching tree-sitter's own rendering
/// without field names. Handy in tests and the summarize-ast command.
std::string to_sexp(const SyntaxNode& root);

} // namespace cjtrans::ast
