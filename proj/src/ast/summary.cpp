#include "cjtrans/ast/summary.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <cctype>

namespace cjtrans::ast {

const RetainedSet& default_retained_set() {
    static const RetainedSet set = {
        "class_declaration",    "class_body",         "method_declaration",
        "constructor_declaration", "formal_parameters", "block",
        "if_statement",         "for_statement",      "enhanced_for_statement",
        "while_statement",      "do_statement",       "switch_expression",
        "try_statement",        "catch_clause",       "return_statement",
        "throw_statement",      "lambda_expression",
    };
    return set;
}

namespace {

void collect(const SyntaxNode& node, const RetainedSet& retained, std::vector<std::string>& out) {
    if (node.is_terminal) return;
    if (!node.is_error && retained.contains(node.category)) out.push_back(node.category);
    for (const auto& child : node.children) collect(child, retained, out);
}

} // namespace

StructuralSummary summarize(const SyntaxNode& tree, const RetainedSet& retained) {
    if (retained.empty()) throw PreconditionError("retained node-kind set must not be empty");
    StructuralSummary summary;
    collect(tree, retained, summary.categories);
    return summary;
}

StructuralSummary summarize_source(std::string_view source, const RetainedSet& retained,
                                   const JavaParser& parser) {
    auto summary = summarize(parse_java(source, parser), retained);
    summary.source_digest = text::sha256_hex(source);
    return summary;
}

bool is_structural_token(std::string_view token) {
    constexpr std::string_view prefix = "<STRUCT:";
    if (!token.starts_with(prefix) || !token.ends_with('>')) return false;
    const auto name = token.substr(prefix.size(), token.size() - prefix.size() - 1);
    if (name.empty()) return false;
    for (const char c : name) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isupper(u) || std::isdigit(u) || c == '_')) return false;
    }
    return true;
}

StructuralTokenVocab::StructuralTokenVocab(std::map<std::string, std::string, std::less<>> mapping,
                                           std::string version)
    : mapping_(std::move(mapping)), version_(std::move(version)) {
    std::set<std::string_view> seen;
    for (const auto& [category, token] : mapping_) {
        if (category.empty()) throw FormatError("vocab: empty category");
        if (!is_structural_token(token)) {
            throw FormatError("vocab: malformed token '" + token + "' for " + category);
        }
        if (token == kOtherToken) {
            throw FormatError("vocab: " + category + " maps to the reserved OTHER token");
        }
        if (!seen.insert(token).second) {
            throw FormatError("vocab: token " + token + " assigned to more than one category");
        }
    }
}

StructuralTokenVocab StructuralTokenVocab::default_vocab() {
    return StructuralTokenVocab(
        {
            {"class_declaration", "<STRUCT:CLASS>"},
            {"class_body", "<STRUCT:CLASS_BODY>"},
            {"method_declaration", "<STRUCT:METHOD>"},
            {"constructor_declaration", "<STRUCT:CONSTRUCTOR>"},
            {"formal_parameters", "<STRUCT:PARAMS>"},
            {"block", "<STRUCT:BLOCK>"},
            {"if_statement", "<STRUCT:IF>"},
            {"for_statement", "<STRUCT:FOR>"},
            {"enhanced_for_statement", "<STRUCT:FOR_EACH>"},
            {"while_statement", "<STRUCT:WHILE>"},
            {"do_statement", "<STRUCT:DO_WHILE>"},
            {"switch_expression", "<STRUCT:SWITCH>"},
            {"try_statement", "<STRUCT:TRY>"},
            {"catch_clause", "<STRUCT:CATCH>"},
            {"return_statement", "<STRUCT:RETURN>"},
            {"throw_statement", "<STRUCT:THROW>"},
            {"lambda_expression", "<STRUCT:LAMBDA>"},
        },
        std::string(kDefaultVersion));
}

StructuralTokenVocab StructuralTokenVocab::parse(std::string_view table) {
    std::map<std::string, std::string, std::less<>> mapping;
    std::string version(kDefaultVersion);
    std::size_t line_no = 0;
    for (const auto raw : text::split_lines(table)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        if (line.starts_with('#')) {
            const auto body = text::trim(line.substr(1));
            if (body.starts_with("version:")) version = std::string(text::trim(body.substr(8)));
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw FormatError("vocab line " + std::to_string(line_no) + ": expected category<TAB>token");
        }
        std::string category(text::trim(line.substr(0, tab)));
        std::string token(text::trim(line.substr(tab + 1)));
        if (!mapping.emplace(category, token).second) {
            throw FormatError("vocab line " + std::to_string(line_no) + ": duplicate category " + category);
        }
    }
    return StructuralTokenVocab(std::move(mapping), std::move(version));
}

StructuralTokenVocab StructuralTokenVocab::load(const std::string& path) {
    return parse(text::read_file(path));
}

std::string StructuralTokenVocab::serialize() const {
    std::string out = "# version: " + version_ + "\n";
    for (const auto& [category, token] : mapping_) out += category + "\t" + token + "\n";
    return out;
}

std::string_view StructuralTokenVocab::token_for(std::string_view category) const {
    const auto it = mapping_.find(category);
    return it == mapping_.end() ? kOtherToken : std::string_view(it->second);
}

std::vector<std::string> tokenize_structure(const StructuralSummary& summary,
                                            const StructuralTokenVocab& vocab) {
    std::vector<std::string> tokens;
    tokens.reserve(summary.categories.size());
    for (const auto& c : summary.categories) tokens.emplace_back(vocab.token_for(c));
    return tokens;
}

bool contains_boundary_marker(std::string_view s) {
    return text::contains(s, kStructBegin) || text::contains(s, kStructEnd) ||
           text::contains(s, kCodeBegin) || text::contains(s, kCodeEnd);
}

std::string render_structured_prompt(std::span<const std::string> tokens, std::string_view source,
                                     std::string_view instruction) {
    if (text::trim(instruction).empty()) throw PreconditionError("instruction must not be empty");
    if (contains_boundary_marker(source)) {
        throw PreconditionError("source contains a reserved boundary marker");
    }
    if (contains_boundary_marker(instruction)) {
        throw PreconditionError("instruction contains a reserved boundary marker");
    }
    std::string out;
    out.reserve(instruction.size() + source.size() + tokens.size() * 16 + 80);
    out.append(instruction);
    out += '\n';
    out.append(kStructBegin);
    out += '\n';
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.empty() || t.find_first_of(" \t\r\n") != std::string::npos) {
            throw PreconditionError("structural token must be non-empty and whitespace-free: '" + t + "'");
        }
        if (i > 0) out += ' ';
        out += t;
    }
    out += '\n';
    out.append(kStructEnd);
    out += '\n';
    out.append(kCodeBegin);
    out += '\n';
    out.append(source);
    out += '\n';
    out.append(kCodeEnd);
    out += '\n';
    return out;
}

namespace {

// Content between "<begin>\n" and the "\n<end>" that follows it.
std::string_view block_between(std::string_view prompt, std::string_view begin, std::string_view end,
                               std::size_t& cursor) {
    const std::string open = std::string(begin) + "\n";
    const std::string close = "\n" + std::string(end);
    const auto b = prompt.find(open, cursor);
    if (b == std::string_view::npos) throw FormatError("prompt has no " + std::string(begin) + " block");
    const auto start = b + open.size();
    const auto e = prompt.find(close, start);
    if (e == std::string_view::npos) throw FormatError("prompt has no " + std::string(end) + " terminator");
    cursor = e + close.size();
    return prompt.substr(start, e - start);
}

} // namespace

PromptBlocks extract_blocks(std::string_view prompt) {
    std::size_t cursor = 0;
    const auto structure = block_between(prompt, kStructBegin, kStructEnd, cursor);
    const auto code = block_between(prompt, kCodeBegin, kCodeEnd, cursor);
    PromptBlocks blocks;
    std::size_t pos = 0;
    while (pos < structure.size()) {
        const auto sp = structure.find(' ', pos);
        const auto tok = structure.substr(pos, sp == std::string_view::npos ? sp : sp - pos);
        if (!tok.empty()) blocks.tokens.emplace_back(tok);
        if (sp == std::string_view::npos) break;
        pos = sp + 1;
    }
    blocks.source = std::string(code);
    return blocks;
}

} // namespace cjtrans::ast
