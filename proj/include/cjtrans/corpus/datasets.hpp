#pragma once

#include "cjtrans/ast/summary.hpp"
#include "cjtrans/error.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/llm/client.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::corpus {

struct SyntaxEntry {
    std::string id;
    std::string title;
    std::vector<std::string> tags;
    std::vector<std::string> typical_questions;
    std::string description;
    std::vector<std::string> code_examples;

    /// Throws FormatError naming the first violated rule.
    void validate() const;
    friend bool operator==(const SyntaxEntry&, const SyntaxEntry&) = default;
};

jsonl::Json to_json(const SyntaxEntry& e);
/// Throws FormatError on missing or mistyped fields.
SyntaxEntry entry_from_json(const jsonl::Json& j);

/// No valid entry could be recovered from a reconstruction reply.
class ReconstructionError : public FormatError {
public:
    ReconstructionError(const std::string& what, std::string raw_reply)
        : FormatError(what), raw_reply_(std::move(raw_reply)) {}
    const std::string& raw_reply() const { return raw_reply_; }

private:
    std::string raw_reply_;
};

struct ReconstructionResult {
    std::vector<SyntaxEntry> entries;
    std::size_t dropped = 0;
    std::vector<std::string> drop_reasons;
};

/// Asks the model to restructure one documentation chapter into entries.
/// Malformed elements of the returned array are dropped and counted.
/// Throws PreconditionError for an empty chapter and ReconstructionError
/// when nothing valid comes back.
ReconstructionResult reconstruct_chapter(std::string_view title, std::string_view chapter,
                                         llm::CompletionClient& client, const llm::DecodingConfig& cfg = {});

/// Section markers of pretraining records, in emission order.
inline constexpr std::string_view kEntryBegin = "<<<ENTRY>>>";
inline constexpr std::string_view kEntryEnd = "<<<END_ENTRY>>>";
inline constexpr std::string_view kIdMarker = "## ID";
inline constexpr std::string_view kTitleMarker = "## TITLE";
inline constexpr std::string_view kTagsMarker = "## TAGS";
inline constexpr std::string_view kQuestionsMarker = "## QUESTIONS";
inline constexpr std::string_view kDescriptionMarker = "## DESCRIPTION";
inline constexpr std::string_view kExamplesMarker = "## EXAMPLES";

/// One `{"text": ...}` record per entry with the fields in fixed order.
std::vector<jsonl::Json> serialize_cpt(const std::vector<SyntaxEntry>& entries);

enum class RejectReason { TooShort, Incomplete, ExternalDependency };
std::string_view reason_name(RejectReason r);

/// Import path prefixes considered standard library.
struct ImportAllowlist {
    std::vector<std::string> prefixes{"std"};

    /// One prefix per line; `#` comments and blank lines ignored.
    static ImportAllowlist parse(std::string_view content);
    static ImportAllowlist load(const std::string& path);
    bool allows(std::string_view import_path) const;
};

struct Rejection {
    std::size_t index = 0;
    RejectReason reason = RejectReason::TooShort;
    std::string detail;
};

struct FilterResult {
    std::vector<std::size_t> retained;
    std::vector<Rejection> rejected;
};

inline constexpr std::size_t kMinSnippetLines = 5;

/// Classifies one snippet; nullopt means retained.
std::optional<Rejection> check_snippet(std::string_view code, const ImportAllowlist& allow = {});
/// Indices into `snippets`; |retained| + |rejected| == |snippets|.
FilterResult filter_snippets(const std::vector<std::string>& snippets, const ImportAllowlist& allow = {});

/// Text up to and including the first sentence terminator that lies outside
/// quotes and is followed by whitespace or the end. Whitespace is collapsed.
std::string first_sentence(std::string_view text);

/// One-sentence functional description of a snippet. Throws
/// PreconditionError when the snippet would be rejected by the filter and
/// FormatError when the reply is empty.
std::string annotate_snippet(std::string_view code, llm::CompletionClient& client,
                             const llm::DecodingConfig& cfg = {}, const ImportAllowlist& allow = {});

struct MonolingualSample {
    std::string instruction;
    std::string input;
    std::string output;

    void validate() const;
    friend bool operator==(const MonolingualSample&, const MonolingualSample&) = default;
};

jsonl::Json to_json(const MonolingualSample& s);
MonolingualSample monolingual_from_json(const jsonl::Json& j);

struct ParallelSample {
    std::string instruction;
    std::vector<std::string> structure_block;
    std::string java_source;
    std::string cangjie_target;

    /// The translation prompt this sample trains on.
    std::string prompt() const;
    friend bool operator==(const ParallelSample&, const ParallelSample&) = default;
};

jsonl::Json to_json(const ParallelSample& s);
ParallelSample parallel_from_json(const jsonl::Json& j);

/// Throws PreconditionError when either text is empty, when the Java has no
/// declaration, or when a text contains a prompt boundary marker.
ParallelSample build_parallel_sample(std::string_view java, std::string_view cangjie,
                                     const ast::StructuralTokenVocab& vocab,
                                     const ast::RetainedSet& retained = ast::default_retained_set());

/// Structural tokens of a Java source. Throws PreconditionError when the
/// source has no declaration.
std::vector<std::string> java_structure_tokens(std::string_view java, const ast::StructuralTokenVocab& vocab,
                                               const ast::RetainedSet& retained = ast::default_retained_set());

} // namespace cjtrans::corpus
