#pragma once

#include "cjtrans/ast/java_parser.hpp"
#include "cjtrans/ast/syntax_node.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::ast {

using RetainedSet = std::set<std::string, std::less<>>;

/// Control-flow and semantic node kinds kept in structural summaries.
const RetainedSet& default_retained_set();

struct StructuralSummary {
    std::vector<std::string> categories;
    std::string source_digest;

    friend bool operator==(const StructuralSummary&, const StructuralSummary&) = default;
};

/// DFS pre-order of internal, non-error nodes whose category is retained.
/// Error nodes are skipped but their subtrees are still visited.
StructuralSummary summarize(const SyntaxNode& tree, const RetainedSet& retained);

/// Parses and summarizes, filling source_digest with the SHA-256 of `source`.
StructuralSummary summarize_source(std::string_view source, const RetainedSet& retained,
                                   const JavaParser& parser = default_java_parser());

/// Maps node-kind categories to `<STRUCT:NAME>` tokens.
class StructuralTokenVocab {
public:
    static constexpr std::string_view kOtherToken = "<STRUCT:OTHER>";
    static constexpr std::string_view kDefaultVersion = "struct-v1";

    /// Validates: every token is well formed, no token repeats, and nothing
    /// maps to the reserved OTHER token.
    StructuralTokenVocab(std::map<std::string, std::string, std::less<>> mapping, std::string version);

    static StructuralTokenVocab default_vocab();

    /// Text table, one `category<TAB>token` per line. A `# version: X` line
    /// sets the version; other `#` lines and blank lines are ignored.
    static StructuralTokenVocab parse(std::string_view table);
    static StructuralTokenVocab load(const std::string& path);
    std::string serialize() const;

    std::string_view token_for(std::string_view category) const;
    const std::map<std::string, std::string, std::less<>>& mapping() const { return mapping_; }
    const std::string& version() const { return version_; }

private:
    std::map<std::string, std::string, std::less<>> mapping_;
    std::string version_;
};

bool is_structural_token(std::string_view token);

std::vector<std::string> tokenize_structure(const StructuralSummary& summary,
                                            const StructuralTokenVocab& vocab);

inline constexpr std::string_view kStructBegin = "<<<STRUCT>>>";
inline constexpr std::string_view kStructEnd = "<<<END_STRUCT>>>";
inline constexpr std::string_view kCodeBegin = "<<<CODE>>>";
inline constexpr std::string_view kCodeEnd = "<<<END_CODE>>>";

bool contains_boundary_marker(std::string_view text);

/// Instruction, then the structural block, then the code block. Throws
/// PreconditionError if the instruction is empty, if source or instruction
/// contain a boundary marker, or if a token is empty or contains whitespace.
std::string render_structured_prompt(std::span<const std::string> tokens, std::string_view source,
                                     std::string_view instruction);

struct PromptBlocks {
    std::vector<std::string> tokens;
    std::string source;

    friend bool operator==(const PromptBlocks&, const PromptBlocks&) = default;
};

/// Inverse of render_structured_prompt. Throws FormatError if a block is missing.
PromptBlocks extract_blocks(std::string_view prompt);

/// Language-neutral keyword/brace approximation of a structural summary, used
/// for code fragments that the Java grammar cannot parse (Cangjie, partial
/// snippets). Emits the same category names as the Java summaries.
std::vector<std::string> heuristic_structure(std::string_view code);

} // namespace cjtrans::ast
