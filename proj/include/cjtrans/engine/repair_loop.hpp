#pragma once

#include "cjtrans/ast/summary.hpp"
#include "cjtrans/engine/toolchain.hpp"
#include "cjtrans/engine/types.hpp"
#include "cjtrans/repo/repository.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cjtrans::engine {

/// Lowercased diagnostics with file paths, line/column numbers, gutter line
/// numbers and hex addresses removed and whitespace collapsed.
std::string error_signature(std::string_view diagnostics);

/// Routing after an evaluation. `top_score` is the best retrieval score and
/// must only be given for a compile failure; without one a compile failure
/// goes to self-analysis. Throws PreconditionError for inconsistent inputs
/// (tests run after a failed compile, tests missing after a successful one,
/// a score given for a successful compile).
Decision select_branch(CompileStatus compile, TestResult tests, std::optional<double> top_score, double threshold);

/// Builds the translation prompt, queries the model and returns iteration 0.
/// Throws PreconditionError when the Java has no declaration and FormatError
/// when the reply holds no code.
IterationRecord translate(std::string_view java, llm::CompletionClient& client,
                          const ast::StructuralTokenVocab& vocab, const llm::DecodingConfig& cfg = {},
                          const ast::RetainedSet& retained = ast::default_retained_set());

/// Compile errors or failed tests, whichever stopped the candidate.
struct RepairInput {
    std::string java_source;
    std::string candidate;
    /// Compiler diagnostics; empty when repairing test failures.
    std::string diagnostics;
    std::vector<TestFailure> test_failures;
};

std::string format_test_failures(const std::vector<TestFailure>& failures);
std::string format_similar_cases(const std::vector<repo::RetrievedCase>& cases);

struct RepairOutput {
    std::string candidate;
    std::optional<std::string> guidance;
    std::vector<Exchange> exchanges;
};

/// Two model calls: an analysis producing guidance, then the corrected code.
/// Uses the test-failure templates when no diagnostics are given.
/// Throws PreconditionError when there is nothing to repair and FormatError
/// when either reply is empty or the second holds no code.
RepairOutput self_analysis_repair(const RepairInput& in, llm::CompletionClient& client,
                                  const llm::DecodingConfig& cfg = {});

/// One model call with the retrieved cases embedded in rank order.
/// Throws PreconditionError for an empty case list.
RepairOutput rag_repair(const std::string& candidate, const std::string& diagnostics,
                        const std::vector<repo::RetrievedCase>& cases, llm::CompletionClient& client,
                        const llm::DecodingConfig& cfg = {});

struct RepairDeps {
    llm::CompletionClient& llm;
    /// May be null or empty; compile failures then go to self-analysis.
    const repo::RepairRepository* repository;
    Compiler& compiler;
    Runner& runner;
};

/// Evaluates the latest candidate and repairs until it is accepted, the
/// error signature repeats on two consecutive iterations, or
/// `max_iterations` candidates have been evaluated. The unit's trace is
/// updated in place, so a partial trace survives an exception.
/// Throws PreconditionError when the unit has no initial candidate or is not
/// pending; adapter and toolchain errors propagate.
UnitStatus run_repair_loop(TranslationUnit& unit, const RepairConfig& cfg, const RepairDeps& deps);

/// Cases learned from compile failures that a self-analysis repair fixed.
/// Throws PreconditionError unless the unit was accepted.
std::vector<repo::RepairCase> harvest_cases(const TranslationUnit& unit);

} // namespace cjtrans::engine
