#include "cjtrans/engine/types.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <cmath>

namespace cjtrans::engine {

using jsonl::Json;

std::vector<TestCase> parse_tests(std::string_view content, const std::string& origin) {
    std::vector<TestCase> out;
    std::size_t n = 0;
    for (const auto& j : jsonl::parse(content, origin)) {
        ++n;
        if (!j.is_object() || !j.contains("input") || !j.contains("expected_output") || !j["input"].is_string() ||
            !j["expected_output"].is_string())
            throw FormatError(origin + ": test " + std::to_string(n) + " needs string fields input, expected_output");
        out.push_back({j["input"].get<std::string>(), j["expected_output"].get<std::string>()});
    }
    return out;
}

std::vector<TestCase> load_tests(const std::string& path) { return parse_tests(text::read_file(path), path); }

std::string_view name(CompileStatus s) { return s == CompileStatus::Success ? "success" : "fail"; }

std::string_view name(TestResult r) {
    switch (r) {
    case TestResult::Pass: return "pass";
    case TestResult::Fail: return "fail";
    case TestResult::NotRun: return "not_run";
    }
    return "?";
}

std::string_view name(Branch b) {
    switch (b) {
    case Branch::Initial: return "initial";
    case Branch::RagRepair: return "rag_repair";
    case Branch::SelfAnalysis: return "self_analysis";
    case Branch::TestRepair: return "test_repair";
    }
    return "?";
}

std::string_view name(Decision d) {
    switch (d) {
    case Decision::Accept: return "accept";
    case Decision::RagRepair: return "rag_repair";
    case Decision::SelfAnalysis: return "self_analysis";
    case Decision::TestRepair: return "test_repair";
    }
    return "?";
}

std::string_view name(UnitStatus s) {
    switch (s) {
    case UnitStatus::Pending: return "pending";
    case UnitStatus::Accepted: return "accepted";
    case UnitStatus::Stagnated: return "stagnated";
    case UnitStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

UnitStatus parse_unit_status(std::string_view s) {
    for (const auto st : {UnitStatus::Pending, UnitStatus::Accepted, UnitStatus::Stagnated, UnitStatus::BudgetExhausted})
        if (name(st) == s) return st;
    throw FormatError("unknown unit status '" + std::string(s) + "'");
}

void RepairConfig::validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
    if (max_iterations == 0) throw ConfigError("max_iterations must be positive");
    if (top_k == 0) throw ConfigError("top_k must be positive");
    if (test_timeout.count() <= 0) throw ConfigError("test timeout must be positive");
    decoding.validate();
}

std::string trace_jsonl(const TranslationUnit& unit, bool redact) {
    std::vector<Json> records;
    records.push_back(Json{{"unit", unit.id}, {"status", name(unit.status)}, {"iterations", unit.candidates.size()}});
    for (const auto& r : unit.candidates) {
        Json j;
        j["k"] = r.k;
        j["branch"] = name(r.branch);
        j["candidate"] = r.candidate;
        j["guidance"] = r.guidance ? Json(*r.guidance) : Json(nullptr);
        j["top_score"] = r.top_score ? Json(*r.top_score) : Json(nullptr);
        j["retrieved_ids"] = r.retrieved_ids;
        if (r.evaluated) {
            j["compile_status"] = name(r.compile_status);
            j["diagnostics"] = r.diagnostics;
            j["test_result"] = name(r.test_result);
            j["test_failures"] = Json::array();
            for (const auto& f : r.test_failures)
                j["test_failures"].push_back(Json{{"index", f.index},
                                                  {"input", f.input},
                                                  {"expected_output", f.expected_output},
                                                  {"actual_output", f.actual_output},
                                                  {"reason", f.reason}});
            j["error_signature"] = r.error_signature;
        } else {
            j["compile_status"] = nullptr;
        }
        j["exchanges"] = Json::array();
        for (const auto& e : r.exchanges) {
            if (redact) j["exchanges"].push_back(Json{{"purpose", e.purpose}, {"prompt_digest", llm::prompt_digest(e.prompt)}});
            else j["exchanges"].push_back(Json{{"purpose", e.purpose}, {"prompt", e.prompt}, {"reply", e.reply}});
        }
        records.push_back(std::move(j));
    }
    return jsonl::dump(records);
}

} // namespace cjtrans::engine
