#pragma once

#include "cjtrans/ast/syntax_node.hpp"

#include <string>
#include <string_view>

namespace cjtrans::ast {

/// Parser adapter: turns Java text into a concrete syntax tree. Malformed
/// input never throws; it yields error-kind nodes instead.
class JavaParser {
public:
    virtual ~JavaParser() = default;
    virtual SyntaxNode parse(std::string_view source) const = 0;
};

/// Tree-sitter with the tree-sitter-java grammar. Stateless; each call owns
/// its own TSParser so one instance can be shared across threads.
class TreeSitterJavaParser final : public JavaParser {
public:
    SyntaxNode parse(std::string_view source) const override;
};

const JavaParser& default_java_parser();

/// Throws PreconditionError on invalid UTF-8.
SyntaxNode parse_java(std::string_view source, const JavaParser& parser = default_java_parser());

/// Reads and parses a file; I/O failures raise cjtrans::Error.
SyntaxNode parse_java_file(const std::string& path, const JavaParser& parser = default_java_parser());

} // namespace cjtrans::ast
