#include "cjtrans/engine/repair_loop.hpp"

#include "cjtrans/ast/java_parser.hpp"
#include "cjtrans/error.hpp"
#include "cjtrans/llm/templates.hpp"
#include "cjtrans/text.hpp"

#include <cstdio>
#include <regex>

namespace cjtrans::engine {

std::string error_signature(std::string_view diagnostics) {
    static const std::regex gutter(R"((^|\n)[ \t]*\d+[ \t]*\|)");
    static const std::regex path(R"((?:[A-Za-z]:)?(?:[\w.~-]*[/\\])+[\w.-]+)");
    static const std::regex file(R"(\b[\w-]+\.(?:cj|java)\b)");
    static const std::regex hex(R"(\b0x[0-9a-fA-F]+\b)");
    static const std::regex position(R"(:\d+(?::\d+)?)");
    static const std::regex line_word(R"(\b(line|column|col)\s*\d+)", std::regex::icase);
    std::string s(diagnostics);
    s = std::regex_replace(s, gutter, "$1|");
    s = std::regex_replace(s, path, "<path>");
    s = std::regex_replace(s, file, "<path>");
    s = std::regex_replace(s, hex, "");
    s = std::regex_replace(s, position, "");
    s = std::regex_replace(s, line_word, "$1");
    return text::collapse_whitespace(text::to_lower(s));
}

Decision select_branch(CompileStatus compile, TestResult tests, std::optional<double> top_score, double threshold) {
    if (compile == CompileStatus::Fail) {
        if (tests != TestResult::NotRun) throw PreconditionError("tests cannot run after a failed compile");
        return top_score && *top_score >= threshold ? Decision::RagRepair : Decision::SelfAnalysis;
    }
    if (tests == TestResult::NotRun) throw PreconditionError("a compiled candidate must be tested");
    if (top_score) throw PreconditionError("retrieval score given for a successful compile");
    return tests == TestResult::Pass ? Decision::Accept : Decision::TestRepair;
}

IterationRecord translate(std::string_view java, llm::CompletionClient& client, const ast::StructuralTokenVocab& vocab,
                          const llm::DecodingConfig& cfg, const ast::RetainedSet& retained) {
    const auto tree = ast::parse_java(java);
    if (!ast::contains_declaration(tree)) throw PreconditionError("java source has no declaration");
    const auto tokens = ast::tokenize_structure(ast::summarize(tree, retained), vocab);
    const auto prompt = ast::render_structured_prompt(tokens, java, llm::templates::translation_instruction());
    const auto reply = client.complete(prompt, cfg);
    const auto code = llm::extract_code_block(reply);
    if (text::trim(code).empty()) throw FormatError("translation reply holds no code");
    IterationRecord r;
    r.k = 0;
    r.candidate = code;
    r.branch = Branch::Initial;
    r.exchanges.push_back({"translate", prompt, reply});
    return r;
}

std::string format_test_failures(const std::vector<TestFailure>& failures) {
    std::string out;
    for (const auto& f : failures) {
        out += "Test " + std::to_string(f.index + 1) + " (" + f.reason + ")\n";
        out += "Input:\n" + f.input + (f.input.ends_with('\n') || f.input.empty() ? "" : "\n");
        out += "Expected output (Java):\n" + text::normalize_output(f.expected_output) + "\n";
        out += "Actual output (Cangjie):\n" + text::normalize_output(f.actual_output) + "\n";
    }
    return out;
}

std::string format_similar_cases(const std::vector<repo::RetrievedCase>& cases) {
    std::string out;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i].repair_case;
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", cases[i].score.total);
        out += "Case " + std::to_string(i + 1) + " (similarity " + score + ")\n";
        out += "Error:\n" + c.error_info + "\n";
        out += "Repair suggestion:\n" + c.repair_suggestion + "\n";
        out += "Before:\n" + c.faulty_fragment + "\n";
        out += "After:\n" + c.corrected_code + "\n";
    }
    return out;
}

namespace {

std::string require_code(const std::string& reply, const char* what) {
    auto code = llm::extract_code_block(reply);
    if (text::trim(code).empty()) throw FormatError(std::string(what) + " reply holds no code");
    return code;
}

} // namespace

RepairOutput self_analysis_repair(const RepairInput& in, llm::CompletionClient& client, const llm::DecodingConfig& cfg) {
    const bool compile_mode = !text::trim(in.diagnostics).empty();
    if (!compile_mode && in.test_failures.empty()) throw PreconditionError("self-analysis repair needs an error");

    llm::Slots slots{{"java_source", in.java_source}, {"cangjie_code", in.candidate}};
    if (compile_mode) slots["error_message"] = in.diagnostics;
    else slots["test_failures"] = format_test_failures(in.test_failures);

    const auto& analysis_t = compile_mode ? llm::templates::compile_repair_analysis() : llm::templates::test_repair_analysis();
    const auto analysis_prompt = analysis_t.render(slots);
    const auto guidance = client.complete(analysis_prompt, cfg);
    if (text::trim(guidance).empty()) throw FormatError("repair analysis reply is empty");

    slots["guidance"] = guidance;
    const auto& code_t = compile_mode ? llm::templates::compile_repair_code() : llm::templates::test_repair_code();
    const auto code_prompt = code_t.render(slots);
    const auto reply = client.complete(code_prompt, cfg);

    RepairOutput out;
    out.candidate = require_code(reply, "repair");
    out.guidance = guidance;
    out.exchanges = {{"repair_analysis", analysis_prompt, guidance}, {"repair_code", code_prompt, reply}};
    return out;
}

RepairOutput rag_repair(const std::string& candidate, const std::string& diagnostics,
                        const std::vector<repo::RetrievedCase>& cases, llm::CompletionClient& client,
                        const llm::DecodingConfig& cfg) {
    if (cases.empty()) throw PreconditionError("retrieval-augmented repair needs at least one case");
    const auto prompt = llm::templates::rag_repair().render(
        {{"error_message", diagnostics}, {"similar_cases", format_similar_cases(cases)}, {"cangjie_code", candidate}});
    const auto reply = client.complete(prompt, cfg);
    RepairOutput out;
    out.candidate = require_code(reply, "rag repair");
    out.exchanges = {{"rag_repair", prompt, reply}};
    return out;
}

namespace {

void evaluate(IterationRecord& rec, const TranslationUnit& unit, const RepairConfig& cfg, const RepairDeps& deps) {
    const auto compiled = deps.compiler.compile(rec.candidate);
    rec.compile_status = compiled.status;
    rec.diagnostics = compiled.diagnostics;
    rec.test_failures.clear();
    if (compiled.status == CompileStatus::Fail) {
        rec.test_result = TestResult::NotRun;
        rec.error_signature = error_signature(rec.diagnostics);
    } else {
        for (std::size_t i = 0; i < unit.tests.size(); ++i) {
            const auto& t = unit.tests[i];
            const auto r = deps.runner.run(compiled, t.input, cfg.test_timeout);
            std::string reason;
            if (r.timed_out) reason = "timeout";
            else if (r.exit_code != 0) reason = "exit code " + std::to_string(r.exit_code);
            else if (text::normalize_output(r.output) != text::normalize_output(t.expected_output)) reason = "mismatch";
            if (!reason.empty()) rec.test_failures.push_back({i, t.input, t.expected_output, r.output, reason});
        }
        rec.test_result = rec.test_failures.empty() ? TestResult::Pass : TestResult::Fail;
        rec.error_signature = rec.test_failures.empty() ? "" : error_signature(format_test_failures(rec.test_failures));
    }
    rec.evaluated = true;
}

} // namespace

UnitStatus run_repair_loop(TranslationUnit& unit, const RepairConfig& cfg, const RepairDeps& deps) {
    cfg.validate();
    if (unit.candidates.empty()) throw PreconditionError("unit " + unit.id + " has no initial candidate");
    if (unit.status != UnitStatus::Pending) throw PreconditionError("unit " + unit.id + " was already processed");
    unit.candidates.resize(1);

    for (std::size_t k = 0;; ++k) {
        auto& rec = unit.candidates[k];
        rec.k = k;
        evaluate(rec, unit, cfg, deps);

        std::optional<double> top_score;
        std::vector<repo::RetrievedCase> retrieved;
        const bool failed_compile = rec.compile_status == CompileStatus::Fail;
        const bool stagnated =
            k > 0 && !rec.error_signature.empty() && rec.error_signature == unit.candidates[k - 1].error_signature;

        if (rec.compile_status == CompileStatus::Success && rec.test_result == TestResult::Pass) {
            unit.status = UnitStatus::Accepted;
            return unit.status;
        }
        if (stagnated) {
            unit.status = UnitStatus::Stagnated;
            return unit.status;
        }
        if (k + 1 >= cfg.max_iterations) {
            unit.status = UnitStatus::BudgetExhausted;
            return unit.status;
        }

        if (failed_compile && deps.repository && !deps.repository->empty()) {
            retrieved = deps.repository->retrieve(repo::query_from_diagnostics(rec.diagnostics, rec.candidate),
                                                  cfg.top_k, cfg.weights);
            top_score = retrieved.front().score.total;
        }
        const auto decision = select_branch(rec.compile_status, rec.test_result, top_score, cfg.threshold);

        IterationRecord next;
        next.k = k + 1;
        next.top_score = top_score;
        for (const auto& r : retrieved) next.retrieved_ids.push_back(r.repair_case.id);
        RepairOutput out;
        switch (decision) {
        case Decision::RagRepair:
            next.branch = Branch::RagRepair;
            out = rag_repair(rec.candidate, rec.diagnostics, retrieved, deps.llm, cfg.decoding);
            break;
        case Decision::SelfAnalysis:
            next.branch = Branch::SelfAnalysis;
            out = self_analysis_repair({unit.java_source, rec.candidate, rec.diagnostics, {}}, deps.llm, cfg.decoding);
            break;
        case Decision::TestRepair:
            next.branch = Branch::TestRepair;
            out = self_analysis_repair({unit.java_source, rec.candidate, "", rec.test_failures}, deps.llm, cfg.decoding);
            break;
        case Decision::Accept:
            throw std::logic_error("accept handled above");
        }
        next.candidate = std::move(out.candidate);
        next.guidance = std::move(out.guidance);
        next.exchanges = std::move(out.exchanges);
        unit.candidates.push_back(std::move(next));
    }
}

std::vector<repo::RepairCase> harvest_cases(const TranslationUnit& unit) {
    if (unit.status != UnitStatus::Accepted) throw PreconditionError("only accepted units are harvested");
    std::vector<repo::RepairCase> out;
    for (std::size_t k = 0; k + 1 < unit.candidates.size(); ++k) {
        const auto& failed = unit.candidates[k];
        const auto& fixed = unit.candidates[k + 1];
        if (failed.compile_status != CompileStatus::Fail || fixed.compile_status != CompileStatus::Success ||
            fixed.branch != Branch::SelfAnalysis)
            continue;
        repo::RepairCase c;
        c.id = "case-" + text::sha256_hex(failed.diagnostics + "\n" + fixed.candidate).substr(0, 16);
        c.error_tags = repo::extract_error_tags(failed.diagnostics);
        c.error_info = failed.diagnostics;
        c.repair_suggestion = fixed.guidance.value_or("");
        c.faulty_fragment = repo::error_region(failed.candidate, failed.diagnostics);
        c.corrected_code = fixed.candidate;
        try {
            c.validate();
        } catch (const PreconditionError&) {
            continue;
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace cjtrans::engine
