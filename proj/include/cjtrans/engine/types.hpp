#pragma once

#include "cjtrans/jsonl.hpp"
#include "cjtrans/llm/client.hpp"
#include "cjtrans/repo/similarity.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace cjtrans::engine {

struct TestCase {
    std::string input;
    std::string expected_output;
    friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// JSONL records `{input, expected_output}`. Throws FormatError.
std::vector<TestCase> parse_tests(std::string_view content, const std::string& origin = "tests");
std::vector<TestCase> load_tests(const std::string& path);

enum class CompileStatus { Success, Fail };
enum class TestResult { Pass, Fail, NotRun };
/// How the candidate of an iteration was produced.
enum class Branch { Initial, RagRepair, SelfAnalysis, TestRepair };
/// What to do after evaluating a candidate.
enum class Decision { Accept, RagRepair, SelfAnalysis, TestRepair };
enum class UnitStatus { Pending, Accepted, Stagnated, BudgetExhausted };

std::string_view name(CompileStatus s);
std::string_view name(TestResult r);
std::string_view name(Branch b);
std::string_view name(Decision d);
std::string_view name(UnitStatus s);
/// Inverse of name(UnitStatus). Throws FormatError.
UnitStatus parse_unit_status(std::string_view s);

/// One model call made while producing a candidate.
struct Exchange {
    std::string purpose;
    std::string prompt;
    std::string reply;
    friend bool operator==(const Exchange&, const Exchange&) = default;
};

struct TestFailure {
    std::size_t index = 0;
    std::string input;
    std::string expected_output;
    std::string actual_output;
    /// "mismatch", "timeout" or "exit code N".
    std::string reason;
    friend bool operator==(const TestFailure&, const TestFailure&) = default;
};

struct IterationRecord {
    std::size_t k = 0;
    std::string candidate;
    Branch branch = Branch::Initial;
    /// Repair analysis that preceded a self-analysis or test repair.
    std::optional<std::string> guidance;
    /// Best retrieval score seen when routing the previous failure.
    std::optional<double> top_score;
    std::vector<std::string> retrieved_ids;
    std::vector<Exchange> exchanges;

    // Filled in when the candidate is evaluated.
    bool evaluated = false;
    CompileStatus compile_status = CompileStatus::Fail;
    std::string diagnostics;
    TestResult test_result = TestResult::NotRun;
    std::vector<TestFailure> test_failures;
    std::string error_signature;
};

struct TranslationUnit {
    std::string id;
    std::string java_source;
    std::vector<TestCase> tests;
    std::vector<IterationRecord> candidates;
    UnitStatus status = UnitStatus::Pending;
};

struct RepairConfig {
    double threshold = 0.5;
    std::size_t max_iterations = 5;
    repo::SimilarityWeights weights = repo::SimilarityWeights::uniform();
    std::size_t top_k = 3;
    std::chrono::milliseconds test_timeout{10000};
    llm::DecodingConfig decoding;

    /// Throws ConfigError.
    void validate() const;
};

/// Trace file: a header record `{unit, status, iterations}` followed by one
/// record per iteration. With `redact`, prompts and replies are omitted.
std::string trace_jsonl(const TranslationUnit& unit, bool redact = false);

} // namespace cjtrans::engine
