#include "cjtrans/ast/java_parser.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <tree_sitter/api.h>

#include <memory>

extern "C" const TSLanguage* tree_sitter_java(void);

namespace cjtrans::ast {

namespace {

struct ParserDeleter {
    void operator()(TSParser* p) const { ts_parser_delete(p); }
};
struct TreeDeleter {
    void operator()(TSTree* t) const { ts_tree_delete(t); }
};

SyntaxNode convert(TSNode node) {
    SyntaxNode out;
    out.category = ts_node_type(node);
    out.is_named = ts_node_is_named(node);
    out.is_error = ts_node_is_error(node) || ts_node_is_missing(node);
    out.span = {ts_node_start_byte(node), ts_node_end_byte(node)};
    const std::uint32_t n = ts_node_child_count(node);
    out.children.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        out.children.push_back(convert(ts_node_child(node, i)));
    }
    out.is_terminal = out.children.empty();
    return out;
}

} // namespace

SyntaxNode TreeSitterJavaParser::parse(std::string_view source) const {
    std::unique_ptr<TSParser, ParserDeleter> parser(ts_parser_new());
    if (!ts_parser_set_language(parser.get(), tree_sitter_java())) {
        throw Error("tree-sitter rejected the Java grammar (ABI mismatch)");
    }
    std::unique_ptr<TSTree, TreeDeleter> tree(ts_parser_parse_string(
        parser.get(), nullptr, source.data(), static_cast<std::uint32_t>(source.size())));
    if (!tree) throw Error("tree-sitter returned no tree");
    return convert(ts_tree_root_node(tree.get()));
}

const JavaParser& default_java_parser() {
    static const TreeSitterJavaParser parser;
    return parser;
}

SyntaxNode parse_java(std::string_view source, const JavaParser& parser) {
    if (!text::is_valid_utf8(source)) throw PreconditionError("Java source is not valid UTF-8");
    return parser.parse(source);
}

SyntaxNode parse_java_file(const std::string& path, const JavaParser& parser) {
    return parse_java(text::read_file(path), parser);
}

} // namespace cjtrans::ast
