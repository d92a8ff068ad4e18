// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.
#include "support/mock_clients.hpp"
#include "support/random_cases.hpp"
#include "support/scripted_world.hpp"
#include "support/test_support.hpp"

#include "cjtrans/ast/java_parser.hpp"
#include "cjtrans/ast/summary.hpp"
#include "cjtrans/cli/commands.hpp"
#include "cjtrans/corpus/builder.hpp"
#include "cjtrans/engine/repair_loop.hpp"
#include "cjtrans/eval/bleu.hpp"
#include "cjtrans/eval/metrics.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/repo/repository.hpp"
#include "cjtrans/text.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace cjtrans;
using cjtrans::testing::data_path;
using cjtrans::testing::fence;
using cjtrans::testing::TempDir;
using jsonl::Json;
namespace fs = std::filesystem;

namespace {

// Collects failed expectations for one criterion.
struct Checker {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

cli::EnvLookup no_env() {
    return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

int invoke(const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run_cli(args, o, e, no_env());
    if (out) *out = o.str() + e.str();
    return code;
}

const std::vector<engine::TestCase> kTests = {{"1\n", "2\n"}, {"5\n", "6\n"}};

// --- 1 ---------------------------------------------------------------------
void metric_identity(Checker& c) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t total = 1 + rng() % 100000;
        const std::uint64_t compiled = rng() % (total + 1);
        const std::uint64_t cf = compiled == 0 ? 0 : rng() % (compiled + 1);
        const auto csr = eval::csr(compiled, total);
        const auto cfe = eval::cfe(cf, compiled);
        const auto fe = eval::Ratio(cf, total);
        // Cross-multiplied with wide integers, independent of Ratio's own normalisation.
        const auto prod = csr * cfe;
        const unsigned __int128 lhs = static_cast<unsigned __int128>(prod.num()) * total;
        const unsigned __int128 rhs = static_cast<unsigned __int128>(cf) * prod.den();
        c.expect(prod == fe && lhs == rhs, "fe != csr*cfe at " + std::to_string(total) + "/" + std::to_string(compiled) +
                                               "/" + std::to_string(cf));
    }
    c.expect(eval::Ratio(105, 165).percent() == "63.64", "FE display");
    c.expect(eval::csr(118, 165).percent() == "71.52", "CSR display");
    c.expect(eval::cfe(105, 118).percent() == "88.98", "CFE display");
    c.expect(std::abs(eval::Ratio(105, 165).value() * 100 - 63.64) <= 0.01, "FE value");
    c.expect(std::abs(eval::csr(118, 165).value() * 100 - 71.52) <= 0.01, "CSR value");
    c.expect(std::abs(eval::cfe(105, 118).value() * 100 - 88.98) <= 0.01, "CFE value");
    c.expect(seconds_since(t0) < 1.0, "runtime >= 1 s");
}

// --- 2 ---------------------------------------------------------------------
void retrieval_oracle(Checker& c) {
    const auto t0 = Clock::now();
    cjtrans::testing::RandomCases gen(2);
    std::mt19937_64 rng(2);
    const auto w = repo::SimilarityWeights::uniform();
    for (int r = 0; r < 200; ++r) {
        repo::RepairRepository repository;
        std::vector<repo::RepairCase> cases;
        const int n = 1 + static_cast<int>(rng() % 100);
        for (int i = 0; i < n; ++i) {
            cases.push_back(gen.make("c" + std::to_string(r) + "-" + std::to_string(i)));
            repository.add_case(cases.back());
        }
        const auto q = gen.query();
        // Brute force: scan every case, keep the best total and the smallest id on ties.
        double best = -1;
        std::string best_id;
        for (const auto& rc : cases) {
            const double total = repo::similarity(q, rc, w).total;
            c.expect(total >= 0.0 && total <= 1.0, "total outside [0,1]");
            if (total > best || (total == best && rc.id < best_id)) {
                best = total;
                best_id = rc.id;
            }
        }
        const auto head = repository.retrieve(q, 1, w);
        c.expect(head.size() == 1 && head[0].repair_case.id == best_id && head[0].score.total == best,
                 "head differs from argmax in repo " + std::to_string(r));
        const auto& self = cases[rng() % cases.size()];
        const double s = repo::similarity(repo::ErrorQuery::from_case(self), self, w).total;
        c.expect(std::abs(s - 1.0) <= 1e-12, "self similarity " + std::to_string(s));
    }
    c.expect(seconds_since(t0) < 30.0, "runtime >= 30 s");
}

// --- 3 ---------------------------------------------------------------------
void loop_conformance(Checker& c) {
    const auto t0 = Clock::now();
    TempDir dir;
    const auto scenario = data_path("scenario");
    fs::copy_file(scenario + "/repository.jsonl", dir.path() / "repo.jsonl");
    std::string out;
    const int code = invoke({"--config", scenario + "/config.json", "repair", "--out", dir.str("out"), "--repository",
                          dir.str("repo.jsonl")},
                         &out);
    c.expect(code == 0, "repair exit " + std::to_string(code) + ": " + out);
    const int eval_code = invoke({"--config", scenario + "/config.json", "evaluate", "--outcomes", dir.str("out/outcomes.jsonl"),
                               "--out", dir.str("out")});
    c.expect(eval_code == 0, "evaluate exit " + std::to_string(eval_code));

    const auto same = [&](const std::string& produced, const std::string& golden) {
        std::string a, b;
        try {
            a = text::read_file(produced);
            b = text::read_file(scenario + "/golden/" + golden);
        } catch (const std::exception& e) {
            c.expect(false, e.what());
            return;
        }
        c.expect(a == b, golden + " differs from golden");
    };
    std::set<std::string> branches, statuses;
    for (const auto& f : corpus::list_files(scenario + "/golden/traces", ".jsonl")) {
        const auto name = fs::path(f).filename().string();
        same(dir.str("out/traces/" + name), "traces/" + name);
        const auto records = jsonl::read(f);
        for (std::size_t i = 1; i < records.size(); ++i) branches.insert(records[i]["branch"].get<std::string>());
    }
    same(dir.str("out/outcomes.jsonl"), "outcomes.jsonl");
    same(dir.str("out/report.txt"), "report.txt");
    same(dir.str("repo.jsonl"), "repository_after.jsonl");
    for (const auto& rec : jsonl::read(scenario + "/golden/outcomes.jsonl")) statuses.insert(rec["status"].get<std::string>());
    c.expect(branches == std::set<std::string>{"initial", "rag_repair", "self_analysis", "test_repair"}, "not all branches");
    c.expect(statuses == std::set<std::string>{"accepted", "budget_exhausted", "stagnated"}, "not all statuses");
    c.expect(seconds_since(t0) < 10.0, "runtime >= 10 s");
}

// --- 4 ---------------------------------------------------------------------
class CyclingCompiler final : public engine::Compiler {
public:
    engine::CompileResult compile(const std::string&) override {
        engine::CompileResult r;
        r.status = engine::CompileStatus::Fail;
        r.diagnostics = calls_++ % 2 ? "error: unused variable 'a'\n ==> main.cj:1:1:" : "error: expected ')'\n ==> main.cj:2:4:";
        return r;
    }

private:
    int calls_ = 0;
};

void stagnation_and_budget(Checker& c) {
    int fresh = 0;
    cjtrans::testing::FunctionClient client([&](std::string_view prompt) -> std::string {
        if (prompt.find("Do not write the full program yet") != std::string_view::npos) return "Analysis.";
        return fence("candidate " + std::to_string(++fresh));
    });
    engine::MockRunner runner;

    for (std::size_t n_max : {3u, 5u, 8u}) {
        engine::MockCompiler constant;
        constant.add("*", {engine::CompileStatus::Fail, "error: undeclared identifier 'q'\n ==> main.cj:4:2:"});
        auto u = cjtrans::testing::unit_with("U", "v0", kTests);
        engine::RepairConfig cfg;
        cfg.max_iterations = n_max;
        const auto s = engine::run_repair_loop(u, cfg, {client, nullptr, constant, runner});
        c.expect(s == engine::UnitStatus::Stagnated && u.candidates.size() == 2,
                 "constant diagnostics gave " + std::to_string(u.candidates.size()) + " iterations");

        CyclingCompiler cycling;
        auto v = cjtrans::testing::unit_with("V", "v0", kTests);
        const auto t = engine::run_repair_loop(v, cfg, {client, nullptr, cycling, runner});
        c.expect(t == engine::UnitStatus::BudgetExhausted && v.candidates.size() == n_max,
                 "cycling diagnostics gave " + std::to_string(v.candidates.size()) + " iterations");
    }
}

// --- 5 ---------------------------------------------------------------------
void collect(const ast::SyntaxNode& n, std::set<std::string>& terminal_only, std::set<std::string>& internal,
             std::map<std::string, std::size_t>& retained_counts, const ast::RetainedSet& retained) {
    if (n.children.empty()) {
        terminal_only.insert(n.category);
    } else {
        internal.insert(n.category);
        if (!n.is_error && retained.count(n.category)) ++retained_counts[n.category];
    }
    for (const auto& ch : n.children) collect(ch, terminal_only, internal, retained_counts, retained);
}

void ast_summary(Checker& c) {
    const auto& retained = ast::default_retained_set();
    const auto golden = jsonl::read(data_path("ast_golden.jsonl"));
    c.expect(golden.size() >= 20, "golden set has fewer than 20 snippets");
    for (const auto& g : golden) {
        const auto java = g.at("java").get<std::string>();
        const auto got = ast::summarize(ast::parse_java(java), retained).categories;
        c.expect(got == g.at("summary").get<std::vector<std::string>>(), "golden mismatch: " + java);
    }
    cjtrans::testing::RandomJava gen(5);
    for (int i = 0; i < 1000; ++i) {
        const auto src = i % 4 == 0 ? gen.mutated() : gen.program();
        const auto tree = ast::parse_java(src);
        const auto summary = ast::summarize(tree, retained).categories;
        std::set<std::string> terminals, internals;
        std::map<std::string, std::size_t> expected;
        collect(tree, terminals, internals, expected, retained);
        std::map<std::string, std::size_t> got;
        for (const auto& cat : summary) {
            ++got[cat];
            c.expect(internals.count(cat) == 1, "summary holds a terminal category '" + cat + "'");
        }
        c.expect(got == expected, "summary counts differ on snippet " + std::to_string(i));
    }
}

// --- 6 ---------------------------------------------------------------------
void bleu_oracle(Checker& c) {
    c.expect(eval::bleu("let total = a + b", {"let total = a + b"}) == 1.0, "identical pair");
    c.expect(eval::bleu("alpha beta gamma delta", {"one two three four"}) == 0.0, "disjoint pair");
    // Unigram 4/5, bigram 3/4, trigram 2/3, 4-gram 1/2, equal lengths.
    const double oracle = std::pow(4.0 / 5 * 3.0 / 4 * 2.0 / 3 * 1.0 / 2, 0.25);
    c.expect(std::abs(eval::bleu("a b c d e", {"a b c d f"}) - oracle) < 1e-6, "5-token example");
}

// --- 7 ---------------------------------------------------------------------
void dataset_determinism(Checker& c) {
    TempDir dir;
    fs::create_directories(dir.path() / "chapters");
    for (int i = 0; i < 122; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "ch%03d.md", i);
        text::write_file_atomic(dir.str(std::string("chapters/") + name),
                                "# Topic " + std::to_string(i) + "\nThe keyword k" + std::to_string(i) + " does thing " +
                                    std::to_string(i) + ".\n");
    }
    auto inner = std::make_shared<cjtrans::testing::FunctionClient>([](std::string_view prompt) {
        const auto at = prompt.find("Chapter: Topic ");
        const auto n = std::string(prompt.substr(at + 15, prompt.find('\n', at) - at - 15));
        return Json::array({Json{{"id", "cj-topic-" + n},
                                 {"title", "Topic " + n},
                                 {"tags", {"t" + n}},
                                 {"typical_questions", {"What does k" + n + " do?"}},
                                 {"description", "k" + n + " does thing " + n + "."},
                                 {"code_examples", {"let k" + n + " = " + n}}}})
            .dump();
    });
    {
        llm::RecordingClient recorder(inner, dir.str("transcript.jsonl"));
        corpus::CorpusInputs in;
        in.chapters_dir = dir.str("chapters");
        corpus::build_corpus(in, dir.str("recorded"), recorder);
    }
    text::write_file_atomic(dir.str("c.json"), R"({"paths": {"chapters": "chapters"}, "llm": {"transcript": "transcript.jsonl"}})");
    std::string out;
    c.expect(invoke({"--config", dir.str("c.json"), "build-corpus", "--out", dir.str("a")}, &out) == 0, "first run: " + out);
    c.expect(invoke({"--config", dir.str("c.json"), "build-corpus", "--out", dir.str("b"), "--jobs", "4"}, &out) == 0,
             "second run: " + out);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir.path() / "a")) {
        const auto name = e.path().filename().string();
        c.expect(fs::exists(dir.path() / "b" / name) && text::read_file(e.path().string()) == text::read_file(dir.str("b/" + name)),
                 name + " differs between runs");
        ++files;
    }
    c.expect(files >= 6, "missing corpus outputs");
    c.expect(jsonl::read(dir.str("a/syntax_entries.jsonl")).size() == 122, "expected 122 entries");

    cjtrans::testing::RandomCases gen(7);
    {
        repo::RepairRepository repository;
        for (int i = 0; i < 217; ++i) repository.add_case(gen.make("case-" + std::to_string(i)));
        repository.save(dir.str("repo.jsonl"));
    }
    const auto t0 = Clock::now();
    const auto loaded = repo::RepairRepository::load(dir.str("repo.jsonl"));
    for (int i = 0; i < 20; ++i) {
        const auto top = loaded.retrieve(gen.query(), 3, repo::SimilarityWeights::uniform());
        c.expect(top.size() == 3, "top-3 size");
    }
    c.expect(loaded.size() == 217, "repository size");
    c.expect(seconds_since(t0) < 1.0, "217-case load and query >= 1 s");
}

// --- 8 ---------------------------------------------------------------------
void threshold_gating(Checker& c) {
    cjtrans::testing::RandomCases gen(8);
    repo::RepairRepository repository;
    for (int i = 0; i < 60; ++i) repository.add_case(gen.make("case-" + std::to_string(i)));
    std::vector<double> tops;
    for (int i = 0; i < 200; ++i)
        tops.push_back(repository.retrieve(gen.query(), 1, repo::SimilarityWeights::uniform())[0].score.total);
    std::size_t previous = tops.size() + 1;
    std::string counts;
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::size_t rag = 0;
        for (double top : tops)
            rag += engine::select_branch(engine::CompileStatus::Fail, engine::TestResult::NotRun, top, tau) ==
                   engine::Decision::RagRepair;
        counts += std::to_string(rag) + " ";
        c.expect(rag <= previous, "RagRepair count rose at tau " + std::to_string(tau));
        previous = rag;
    }
    c.expect(counts.substr(0, counts.find(' ')) == std::to_string(tops.size()), "tau 0 should route every query: " + counts);
}

// --- 9 ---------------------------------------------------------------------
void harvest_soundness(Checker& c) {
    cjtrans::testing::ScriptedToolchain tc;
    const std::string v0 = "main() {\n    let n = 1\n    n = 2\n    println(n)\n}";
    const std::string v1 = "main() {\n    var n = 1\n    n = 2\n    println(n)\n}";
    const std::string v2 = "main() {\n    var n: Int64 = \"1\"\n    println(n + 1)\n}";
    const std::string v3 = "main() {\n    var n: Int64 = 1\n    println(n + 1)\n}";
    tc.compile_fail(v0, "error: cannot assign to immutable value\n ==> main.cj:3:5:");
    tc.compile_ok(v1, "0\n");
    tc.compile_fail(v2, "error: mismatched types\n ==> main.cj:2:20:\nexpected 'Int64', found 'String'");
    tc.compile_ok(v3, "2\n");
    tc.runner.add(engine::candidate_digest(v3), "5\n", {0, "6\n", false});
    repo::RepairRepository repository;
    repository.add_case({"seed", {"type-mismatch"}, "error: mismatched types\nexpected 'Int64', found 'String'",
                         "Use an integer literal.", "let n: Int64 = \"1\"", "let n: Int64 = 1"});
    cjtrans::testing::ScriptedClient client(
        {"Declare n with var.", fence(v1), "Print n plus one.", fence(v2), fence(v3)});
    auto u = cjtrans::testing::unit_with("H", v0, kTests);
    engine::RepairConfig cfg;
    cfg.threshold = 0.3;
    const auto status = engine::run_repair_loop(u, cfg, {client, &repository, tc.compiler, tc.runner});
    c.expect(status == engine::UnitStatus::Accepted, "run not accepted");
    std::multiset<engine::Branch> fixes;
    for (const auto& r : u.candidates) fixes.insert(r.branch);
    c.expect(fixes.count(engine::Branch::SelfAnalysis) == 1 && fixes.count(engine::Branch::RagRepair) == 1,
             "run lacks one self-analysis and one RAG fix");
    if (status != engine::UnitStatus::Accepted) return;

    const auto cases = engine::harvest_cases(u);
    c.expect(cases.size() == 1, "harvested " + std::to_string(cases.size()) + " cases");
    if (cases.empty()) return;
    TempDir dir;
    for (const auto& hc : cases) repository.add_case(hc);
    repository.save(dir.str("repo.jsonl"));
    const auto loaded = repo::RepairRepository::load(dir.str("repo.jsonl"));
    c.expect(loaded == repository, "repository differs after reload");
    c.expect(loaded.serialize() == text::read_file(dir.str("repo.jsonl")), "serialization not stable");
    const auto back = loaded.cases();
    c.expect(std::find(back.begin(), back.end(), cases[0]) != back.end(), "harvested case lost");
    c.expect(cases[0].corrected_code == v1 && cases[0].repair_suggestion == "Declare n with var.", "wrong case harvested");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria = {
        {"metric identity fe = csr * cfe", metric_identity},
        {"retrieval head equals brute-force argmax", retrieval_oracle},
        {"repair loop traces match goldens", loop_conformance},
        {"stagnation and iteration budget", stagnation_and_budget},
        {"structural summary goldens and fuzz", ast_summary},
        {"BLEU oracle", bleu_oracle},
        {"dataset determinism and repository capacity", dataset_determinism},
        {"threshold gating is monotone", threshold_gating},
        {"harvest soundness", harvest_soundness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Checker c;
        const auto t0 = Clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = c.failures.empty();
        failed += !ok;
        std::printf("%s %zu: %s (%.3f s)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), seconds_since(t0));
        for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
