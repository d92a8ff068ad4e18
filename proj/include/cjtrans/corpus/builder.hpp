#pragma once

#include "cjtrans/corpus/datasets.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cjtrans::corpus {

struct CorpusInputs {
    /// Directory of `.md` documentation chapters. Required.
    std::string chapters_dir;
    /// Directory of `.cj` snippets for monolingual samples. Optional.
    std::string snippets_dir;
    /// Directory of `<name>.java` / `<name>.cj` pairs. Optional.
    std::string parallel_dir;
    ImportAllowlist allowlist;
    ast::StructuralTokenVocab vocab = ast::StructuralTokenVocab::default_vocab();
    ast::RetainedSet retained = ast::default_retained_set();
    llm::DecodingConfig decoding;
    std::size_t jobs = 1;
};

struct FileError {
    std::string file;
    std::string stage;
    std::string message;
};

struct CorpusStats {
    std::size_t chapters = 0;
    std::size_t entries = 0;
    std::size_t dropped_entries = 0;
    std::size_t snippets = 0;
    std::size_t retained_snippets = 0;
    std::map<std::string, std::size_t> rejected_by_reason;
    std::size_t monolingual = 0;
    std::size_t parallel = 0;
    std::vector<FileError> errors;

    jsonl::Json to_json() const;
};

/// Output file names inside the output directory.
inline constexpr std::string_view kCptFile = "cpt.jsonl";
inline constexpr std::string_view kEntriesFile = "syntax_entries.jsonl";
inline constexpr std::string_view kMonolingualFile = "monolingual.jsonl";
inline constexpr std::string_view kParallelFile = "parallel.jsonl";
inline constexpr std::string_view kRejectedFile = "rejected_snippets.jsonl";
inline constexpr std::string_view kStatsFile = "stats.json";

/// Builds all datasets. Inputs are visited in sorted path order so reruns
/// with the same transcript produce identical files. Failures on single
/// files are recorded in the stats and the run continues. Throws
/// PreconditionError when the chapter directory is missing or holds no
/// chapters.
CorpusStats build_corpus(const CorpusInputs& inputs, const std::string& output_dir, llm::CompletionClient& client);

/// Sorted regular files with the given extension directly inside `dir`.
std::vector<std::string> list_files(const std::string& dir, std::string_view extension);

} // namespace cjtrans::corpus
