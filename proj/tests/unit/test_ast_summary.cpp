#include "doctest.h"
#include "support/test_support.hpp"

#include "cjtrans/ast/java_parser.hpp"
#include "cjtrans/ast/summary.hpp"
#include "cjtrans/error.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/text.hpp"

#include <functional>
#include <set>

using namespace cjtrans;
using namespace cjtrans::ast;
using cjtrans::testing::RandomJava;

namespace {

std::vector<std::string> summary_of(std::string_view java) {
    return summarize(parse_java(java), default_retained_set()).categories;
}

// Checks span nesting and terminal/child consistency for a subtree.
void check_tree_invariants(const SyntaxNode& node) {
    CHECK(node.is_terminal == node.children.empty());
    std::uint32_t cursor = node.span.begin;
    for (const auto& c : node.children) {
        CHECK(c.span.begin >= cursor);
        CHECK(c.span.end <= node.span.end);
        CHECK(c.span.begin <= c.span.end);
        cursor = c.span.end;
        check_tree_invariants(c);
    }
}

// Independent traversal: explicit stack rather than recursion.
std::vector<std::string> stack_summary(const SyntaxNode& root, const RetainedSet& retained) {
    std::vector<std::string> out;
    std::vector<const SyntaxNode*> stack{&root};
    while (!stack.empty()) {
        const auto* n = stack.back();
        stack.pop_back();
        if (!n->children.empty() && !n->is_error && retained.count(n->category)) out.push_back(n->category);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(&*it);
    }
    return out;
}

void terminal_categories(const SyntaxNode& n, std::set<std::string>& terminals, std::set<std::string>& internals) {
    (n.is_terminal ? terminals : internals).insert(n.category);
    for (const auto& c : n.children) terminal_categories(c, terminals, internals);
}

} // namespace

TEST_CASE("parse produces grammar node kinds") {
    SUBCASE("class declaration") {
        const auto root = parse_java("class A {}");
        CHECK(root.category == "program");
        REQUIRE(root.children.size() == 1);
        CHECK(root.children[0].category == "class_declaration");
        CHECK(to_sexp(root) == "(program (class_declaration (identifier) (class_body)))");
    }
    SUBCASE("empty source has no declarations") {
        const auto root = parse_java("");
        CHECK(root.children.empty());
        CHECK_FALSE(contains_declaration(root));
    }
    SUBCASE("malformed source yields an error node, not an exception") {
        const auto root = parse_java("int x = ;");
        CHECK(contains_error(root));
    }
    SUBCASE("invalid utf-8 is rejected") {
        CHECK_THROWS_AS(parse_java(std::string("class A { String s = \"\xff\"; }")), PreconditionError);
    }
    SUBCASE("file read failure") {
        CHECK_THROWS_AS(parse_java_file("/nonexistent/Main.java"), Error);
    }
}

TEST_CASE("summarize follows the hand-traced golden set") {
    const auto cases = jsonl::read(cjtrans::testing::data_path("ast_golden.jsonl"));
    REQUIRE(cases.size() >= 20);
    for (const auto& c : cases) {
        const auto java = c.at("java").get<std::string>();
        const auto expected = c.at("summary").get<std::vector<std::string>>();
        INFO(java);
        CHECK(summary_of(java) == expected);
    }
}

TEST_CASE("summarize edge cases") {
    const auto tree = parse_java("int f(int x){ if(x>0){return 1;} return 0; }");
    CHECK(summarize(tree, {"while_statement"}).categories.empty());
    CHECK_THROWS_AS(summarize(tree, {}), PreconditionError);
    CHECK(summarize(tree, {"if_statement", "return_statement"}).categories ==
          std::vector<std::string>{"if_statement", "return_statement", "return_statement"});
    // Terminal categories never appear even when explicitly retained.
    CHECK(summarize(tree, {"identifier", "{"}).categories.empty());

    const auto s = summarize_source("class A {}", default_retained_set());
    CHECK(s.source_digest == text::sha256_hex("class A {}"));
}

TEST_CASE("error nodes are skipped but their subtrees still count") {
    const auto tree = parse_java("class E { void f() { int x = ; return; } }");
    CHECK(contains_error(tree));
    const auto cats = summarize(tree, RetainedSet{"ERROR", "return_statement"}).categories;
    CHECK(cats == std::vector<std::string>{"return_statement"});
}

TEST_CASE("summary invariants hold on a fuzz corpus") {
    RandomJava gen(20240611);
    const auto& retained = default_retained_set();
    for (int i = 0; i < 300; ++i) {
        const auto src = (i % 3 == 0) ? gen.mutated() : gen.program();
        const auto tree = parse_java(src);
        check_tree_invariants(tree);
        const auto summary = summarize(tree, retained).categories;
        CHECK(summary.size() <= count_internal_nodes(tree));
        CHECK(summary == stack_summary(tree, retained));
        std::set<std::string> terminals, internals;
        terminal_categories(tree, terminals, internals);
        for (const auto& cat : summary) {
            CHECK(internals.count(cat) == 1);
        }
        if (i % 3 != 0) CHECK_FALSE(summary.empty());
    }
}

TEST_CASE("tokenize_structure") {
    const StructuralTokenVocab vocab({{"if_statement", "<STRUCT:IF>"}}, "t");
    CHECK(tokenize_structure({{"if_statement"}, ""}, vocab) == std::vector<std::string>{"<STRUCT:IF>"});
    CHECK(tokenize_structure({{}, ""}, vocab).empty());
    CHECK(tokenize_structure({{"unmapped_kind"}, ""}, vocab) == std::vector<std::string>{"<STRUCT:OTHER>"});

    const auto def = StructuralTokenVocab::default_vocab();
    for (const auto& cat : default_retained_set()) {
        CHECK(def.token_for(cat) != StructuralTokenVocab::kOtherToken);
    }
}

TEST_CASE("vocab table persistence and validation") {
    const auto def = StructuralTokenVocab::default_vocab();
    const auto reparsed = StructuralTokenVocab::parse(def.serialize());
    CHECK(reparsed.mapping() == def.mapping());
    CHECK(reparsed.version() == def.version());

    CHECK_THROWS_AS(StructuralTokenVocab::parse("a\t<STRUCT:X>\nb\t<STRUCT:X>\n"), FormatError);
    CHECK_THROWS_AS(StructuralTokenVocab::parse("a\t<STRUCT:OTHER>\n"), FormatError);
    CHECK_THROWS_AS(StructuralTokenVocab::parse("a <STRUCT:A>\n"), FormatError);
    CHECK_THROWS_AS(StructuralTokenVocab::parse("a\tSTRUCT_A\n"), FormatError);
    CHECK_THROWS_AS(StructuralTokenVocab::parse("a\t<STRUCT:A>\na\t<STRUCT:B>\n"), FormatError);

    const auto v = StructuralTokenVocab::parse("# version: custom-2\n\nif_statement\t<STRUCT:IF>\n");
    CHECK(v.version() == "custom-2");
    CHECK(v.token_for("if_statement") == "<STRUCT:IF>");
}

TEST_CASE("render_structured_prompt") {
    const std::vector<std::string> tokens = {"<STRUCT:METHOD>", "<STRUCT:PARAMS>", "<STRUCT:BLOCK>", "<STRUCT:IF>"};
    const std::string source = "void f(int x) { if (x > 0) { y(); } }";
    const auto prompt = render_structured_prompt(tokens, source, "Translate the following Java code into Cangjie.");
    CHECK(prompt == text::read_file(cjtrans::testing::data_path("structured_prompt.golden")));
    CHECK(prompt.find(kStructBegin) < prompt.find(kCodeBegin));

    SUBCASE("empty token list keeps an empty structural block") {
        const auto p = render_structured_prompt({}, "x", "Translate");
        CHECK(text::contains(p, "<<<STRUCT>>>\n\n<<<END_STRUCT>>>"));
        CHECK(extract_blocks(p).tokens.empty());
    }
    SUBCASE("precondition and marker errors") {
        CHECK_THROWS_AS(render_structured_prompt(tokens, source, "  "), PreconditionError);
        CHECK_THROWS_AS(render_structured_prompt(tokens, "a <<<END_CODE>>> b", "T"), PreconditionError);
        CHECK_THROWS_AS(render_structured_prompt(tokens, source, "T <<<STRUCT>>>"), PreconditionError);
        CHECK_THROWS_AS(extract_blocks("no blocks here"), FormatError);
    }
    SUBCASE("determinism") {
        CHECK(prompt == render_structured_prompt(tokens, source, "Translate the following Java code into Cangjie."));
    }
}

TEST_CASE("render/extract round trip on random sources") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abcXYZ019 {}();<>:\n\t\"'\\/*-_=";
    const auto vocab = StructuralTokenVocab::default_vocab();
    std::vector<std::string> all_tokens;
    for (const auto& [cat, tok] : vocab.mapping()) all_tokens.push_back(tok);
    all_tokens.emplace_back(StructuralTokenVocab::kOtherToken);
    for (int i = 0; i < 500; ++i) {
        std::string source;
        const auto len = rng() % 80;
        for (std::size_t j = 0; j < len; ++j) source += alphabet[rng() % alphabet.size()];
        std::vector<std::string> tokens;
        const auto ntok = rng() % 6;
        for (std::size_t j = 0; j < ntok; ++j) tokens.push_back(all_tokens[rng() % all_tokens.size()]);
        if (contains_boundary_marker(source)) continue;
        const auto blocks = extract_blocks(render_structured_prompt(tokens, source, "Translate"));
        CHECK(blocks.tokens == tokens);
        CHECK(blocks.source == source);
    }
}

TEST_CASE("heuristic structure of non-Java fragments") {
    const auto cats = heuristic_structure(
        "func add(a: Int64, b: Int64): Int64 {\n  if (a > b) { return a }\n  // while in comment\n  return b\n}");
    CHECK(cats == std::vector<std::string>{"method_declaration", "formal_parameters", "block", "if_statement",
                                           "block", "return_statement", "return_statement"});
    CHECK(heuristic_structure("let s = \"for while if\"").empty());
    CHECK(heuristic_structure("").empty());
    CHECK(heuristic_structure("match (x) { case 1 => 2 }") ==
          std::vector<std::string>{"switch_expression", "block", "lambda_expression"});
}
