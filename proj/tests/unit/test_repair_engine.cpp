#include "doctest.h"
#include "support/scripted_world.hpp"
#include "support/test_support.hpp"

#include "cjtrans/engine/process.hpp"
#include "cjtrans/engine/repair_loop.hpp"
#include "cjtrans/llm/templates.hpp"
#include "cjtrans/text.hpp"

#include <random>

using namespace cjtrans;
using namespace cjtrans::engine;
using cjtrans::testing::fence;
using cjtrans::testing::FunctionClient;
using cjtrans::testing::ScriptedClient;
using cjtrans::testing::ScriptedToolchain;
using cjtrans::testing::unit_with;

namespace {

const std::vector<TestCase> kTests = {{"1\n", "2\n"}, {"5\n", "6\n"}};

repo::RepairCase stored_case(const std::string& id, const std::string& diag, const std::string& suggestion) {
    return repo::RepairCase{id, {}, diag, suggestion, "let x: Int64 = \"a\"", "let x: Int64 = 1"};
}

} // namespace

TEST_CASE("error signatures ignore positions, paths and addresses") {
    const auto a = error_signature("error: mismatched types\n ==> main.cj:3:5:\n  |\n3 |     let x: Int64 = \"a\"\n");
    const auto b = error_signature("Error: Mismatched   types\n ==> /tmp/build-1/main.cj:17:2:\n  |\n17 |     let x: Int64 = \"a\"\n");
    CHECK(a == b);
    CHECK(a == "error: mismatched types ==> <path>: | | let x: int64 = \"a\"");
    CHECK(error_signature("segfault at 0x7ffd1234 line 4") == error_signature("segfault at 0xdeadbeef line 9"));
    CHECK(error_signature("error: undeclared identifier 'x'") != error_signature("error: undeclared identifier 'y'"));
    CHECK(error_signature("  \n").empty());
}

TEST_CASE("select_branch examples and totality") {
    CHECK(select_branch(CompileStatus::Success, TestResult::Pass, std::nullopt, 0.5) == Decision::Accept);
    CHECK(select_branch(CompileStatus::Fail, TestResult::NotRun, 0.9, 0.5) == Decision::RagRepair);
    CHECK(select_branch(CompileStatus::Fail, TestResult::NotRun, 0.3, 0.5) == Decision::SelfAnalysis);
    CHECK(select_branch(CompileStatus::Success, TestResult::Fail, std::nullopt, 0.5) == Decision::TestRepair);
    CHECK(select_branch(CompileStatus::Fail, TestResult::NotRun, 0.5, 0.5) == Decision::RagRepair);
    CHECK(select_branch(CompileStatus::Fail, TestResult::NotRun, std::nullopt, 0.0) == Decision::SelfAnalysis);

    for (const auto c : {CompileStatus::Success, CompileStatus::Fail}) {
        for (const auto t : {TestResult::Pass, TestResult::Fail, TestResult::NotRun}) {
            for (const std::optional<double> s : {std::optional<double>{}, std::optional<double>{0.0},
                                                  std::optional<double>{0.5}, std::optional<double>{1.0}}) {
                const bool consistent = (c == CompileStatus::Fail) == (t == TestResult::NotRun) &&
                                        (c == CompileStatus::Fail || !s);
                if (!consistent) {
                    CHECK_THROWS_AS(select_branch(c, t, s, 0.5), PreconditionError);
                    continue;
                }
                const auto d = select_branch(c, t, s, 0.5);
                if (c == CompileStatus::Success) CHECK(d == (t == TestResult::Pass ? Decision::Accept : Decision::TestRepair));
                else CHECK(d == (s && *s >= 0.5 ? Decision::RagRepair : Decision::SelfAnalysis));
            }
        }
    }
}

TEST_CASE("translate renders the structural prompt and extracts the code") {
    const auto vocab = ast::StructuralTokenVocab::default_vocab();
    const std::string java = "class A { int f(int x) { if (x > 0) { return 1; } return 0; } }";
    ScriptedClient client({"Here you go:\n" + fence("class A {\n    func f(x: Int64): Int64 { 0 }\n}") + "\nDone."});
    const auto rec = translate(java, client, vocab);
    CHECK(rec.k == 0);
    CHECK(rec.branch == Branch::Initial);
    CHECK(rec.candidate == "class A {\n    func f(x: Int64): Int64 { 0 }\n}");
    REQUIRE(rec.exchanges.size() == 1);

    const auto blocks = ast::extract_blocks(client.prompts.front());
    CHECK(blocks.source == java);
    const auto expected = ast::tokenize_structure(ast::summarize_source(java, ast::default_retained_set()), vocab);
    CHECK(blocks.tokens == expected);
    CHECK(client.prompts.front().starts_with(llm::templates::translation_instruction()));

    ScriptedClient unused({});
    CHECK_THROWS_AS(translate("int x = ;", unused, vocab), PreconditionError);
    ScriptedClient empty({"```\n```"});
    CHECK_THROWS_AS(translate(java, empty, vocab), FormatError);
}

TEST_CASE("self-analysis repair makes two calls") {
    ScriptedClient client({"The variable is immutable; declare it with var.", fence("var x = 1\nx = 2")});
    const auto out = self_analysis_repair({"class A {}", "let x = 1\nx = 2", "error: cannot assign to immutable value", {}}, client);
    CHECK(out.candidate == "var x = 1\nx = 2");
    CHECK(out.guidance == "The variable is immutable; declare it with var.");
    REQUIRE(out.exchanges.size() == 2);
    CHECK(client.prompts[0].find("cannot assign to immutable value") != std::string::npos);
    CHECK(client.prompts[1].find("declare it with var") != std::string::npos);

    ScriptedClient tests_client({"Off by one.", fence("println(n + 1)")});
    const std::vector<TestFailure> failures = {{0, "41\n", "42\n", "41\n", "mismatch"}};
    const auto t = self_analysis_repair({"class A {}", "println(n)", "", failures}, tests_client);
    CHECK(t.candidate == "println(n + 1)");
    CHECK(tests_client.prompts[0].find("Input:\n41\n") != std::string::npos);
    CHECK(tests_client.prompts[0].find("Expected output (Java):\n42\n") != std::string::npos);
    CHECK(tests_client.prompts[0].find("Actual output (Cangjie):\n41\n") != std::string::npos);

    ScriptedClient empty_code({"Analysis.", "   "});
    CHECK_THROWS_AS(self_analysis_repair({"class A {}", "x", "error: e", {}}, empty_code), FormatError);
    ScriptedClient unused({});
    CHECK_THROWS_AS(self_analysis_repair({"class A {}", "x", "", {}}, unused), PreconditionError);
}

TEST_CASE("rag repair embeds cases in rank order") {
    repo::RepairRepository repo;
    repo.add_case(stored_case("a", "error: mismatched types expected Int64 found String", "Parse the string with Int64.parse."));
    repo.add_case(stored_case("b", "error: undeclared identifier 'total'", "Declare total before the loop."));
    repo.add_case(stored_case("c", "error: cannot assign to immutable value", "Use var instead of let."));
    const std::string diag = "error: mismatched types expected Int64 found String";
    const auto top = repo.retrieve(repo::query_from_diagnostics(diag, "let x: Int64 = \"a\""), 3, repo::SimilarityWeights::uniform());

    ScriptedClient one({fence("let x: Int64 = 1")});
    const auto out = rag_repair("let x: Int64 = \"a\"", diag, {top.front()}, one);
    CHECK(out.candidate == "let x: Int64 = 1");
    CHECK(one.prompts[0].find("Parse the string with Int64.parse.") != std::string::npos);

    ScriptedClient three({fence("let x: Int64 = 1")});
    rag_repair("let x: Int64 = \"a\"", diag, top, three);
    const auto& p = three.prompts[0];
    std::vector<std::size_t> pos;
    for (const auto& r : top) pos.push_back(p.find(r.repair_case.repair_suggestion));
    CHECK(pos[0] < pos[1]);
    CHECK(pos[1] < pos[2]);
    CHECK(p.find("Case 1") < p.find("Case 2"));

    ScriptedClient unused({});
    CHECK_THROWS_AS(rag_repair("x", diag, {}, unused), PreconditionError);
}

TEST_CASE("loop accepts a passing initial candidate") {
    ScriptedToolchain tc;
    tc.compile_ok("good", "2\n");
    tc.runner.add(candidate_digest("good"), "5\n", {0, "6\n", false});
    ScriptedClient client({});
    auto u = unit_with("U", "good", kTests);
    CHECK(run_repair_loop(u, {}, {client, nullptr, tc.compiler, tc.runner}) == UnitStatus::Accepted);
    CHECK(u.candidates.size() == 1);
    CHECK(u.candidates[0].test_result == TestResult::Pass);
    CHECK(harvest_cases(u).empty());
}

TEST_CASE("loop stagnates on a repeated diagnostic") {
    ScriptedToolchain tc;
    tc.compiler.add("*", {CompileStatus::Fail, "error: undeclared identifier 'x'\n ==> main.cj:1:1:"});
    ScriptedClient client({"Declare x.", fence("v1"), "Declare x again.", fence("v2")});
    auto u = unit_with("U", "v0", kTests);
    CHECK(run_repair_loop(u, {}, {client, nullptr, tc.compiler, tc.runner}) == UnitStatus::Stagnated);
    REQUIRE(u.candidates.size() == 2);
    CHECK(u.candidates[1].k == 1);
    CHECK(u.candidates[1].branch == Branch::SelfAnalysis);
    CHECK(u.candidates[0].error_signature == u.candidates[1].error_signature);
    CHECK(client.remaining() == 2);
}

TEST_CASE("loop repairs Fail, Fail, then accepts") {
    ScriptedToolchain tc;
    tc.compile_fail("v0", "error: undeclared identifier 'total'\n ==> main.cj:2:5:");
    tc.compile_fail("v1", "error: mismatched types\n ==> main.cj:3:9:");
    tc.compile_ok("v2", "2\n");
    tc.runner.add(candidate_digest("v2"), "5\n", {0, "6\n", false});
    repo::RepairRepository repo;
    repo.add_case(stored_case("r1", "error: mismatched types", "Convert with Int64()."));
    ScriptedClient client({"Declare total.", fence("v1"), fence("v2")});
    auto u = unit_with("U", "v0", kTests);
    RepairConfig cfg;
    cfg.threshold = 0.3;
    CHECK(run_repair_loop(u, cfg, {client, &repo, tc.compiler, tc.runner}) == UnitStatus::Accepted);
    REQUIRE(u.candidates.size() == 3);
    CHECK(u.candidates[0].branch == Branch::Initial);
    CHECK(u.candidates[1].branch == Branch::SelfAnalysis);
    CHECK(u.candidates[2].branch == Branch::RagRepair);
    CHECK(*u.candidates[1].top_score < 0.3);
    CHECK(*u.candidates[2].top_score >= 0.3);
    CHECK(u.candidates[2].retrieved_ids == std::vector<std::string>{"r1"});

    const auto harvested = harvest_cases(u);
    CHECK(harvested.empty());
}

TEST_CASE("loop repairs failing tests and exhausts the budget") {
    ScriptedToolchain tc;
    tc.compile_ok("v0", "1\n");
    tc.compile_ok("v1", "0\n");
    tc.compile_ok("v2", "3\n");
    ScriptedClient client({"Add one.", fence("v1"), "Add two.", fence("v2")});
    auto u = unit_with("U", "v0", kTests);
    RepairConfig cfg;
    cfg.max_iterations = 3;
    CHECK(run_repair_loop(u, cfg, {client, nullptr, tc.compiler, tc.runner}) == UnitStatus::BudgetExhausted);
    REQUIRE(u.candidates.size() == 3);
    CHECK(u.candidates[1].branch == Branch::TestRepair);
    CHECK(u.candidates[2].test_failures.size() == 2);
    CHECK(u.candidates[2].test_failures[0].reason == "mismatch");
    CHECK_THROWS_AS(harvest_cases(u), PreconditionError);
    CHECK_THROWS_AS(run_repair_loop(u, cfg, {client, nullptr, tc.compiler, tc.runner}), PreconditionError);
}

TEST_CASE("a crashing or hanging program fails its test") {
    ScriptedToolchain tc;
    tc.compiler.add("*", {CompileStatus::Success, ""});
    tc.runner.add(candidate_digest("v0"), "1\n", {0, "2\n", true});
    tc.runner.add(candidate_digest("v0"), "5\n", {1, "6\n", false});
    ScriptedClient client({});
    auto u = unit_with("U", "v0", kTests);
    RepairConfig cfg;
    cfg.max_iterations = 1;
    CHECK(run_repair_loop(u, cfg, {client, nullptr, tc.compiler, tc.runner}) == UnitStatus::BudgetExhausted);
    const auto& f = u.candidates[0].test_failures;
    REQUIRE(f.size() == 2);
    CHECK(f[0].reason == "timeout");
    CHECK(f[1].reason == "exit code 1");
}

TEST_CASE("harvest takes self-analysis fixes only") {
    ScriptedToolchain tc;
    const std::string v0 = "main() {\n    let x = 1\n    x = 2\n    println(x)\n}";
    const std::string v1 = "main() {\n    var x = 1\n    x = 2\n    println(x)\n}";
    const std::string diag = "error: cannot assign to immutable value\n ==> main.cj:3:5:";
    tc.compile_fail(v0, diag);
    tc.compile_ok(v1, "2\n");
    tc.runner.add(candidate_digest(v1), "5\n", {0, "6\n", false});
    ScriptedClient client({"Declare x with var.", fence(v1)});
    auto u = unit_with("U", v0, kTests);
    CHECK(run_repair_loop(u, {}, {client, nullptr, tc.compiler, tc.runner}) == UnitStatus::Accepted);
    const auto cases = harvest_cases(u);
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].error_info == diag);
    CHECK(cases[0].repair_suggestion == "Declare x with var.");
    CHECK(cases[0].corrected_code == v1);
    CHECK(cases[0].faulty_fragment == "main() {\n    let x = 1\n    x = 2\n    println(x)\n}");
    CHECK(cases[0].error_tags == std::vector<std::string>{"immutability"});
}

TEST_CASE("loop invariants under adversarial mocks") {
    std::mt19937_64 rng(77);
    const std::vector<std::string> diags = {"error: a", "error: b", "error: c"};
    for (int round = 0; round < 300; ++round) {
        ScriptedToolchain tc;
        const auto max_iter = 1 + rng() % 6;
        // Every candidate the client can produce gets a random behaviour.
        std::vector<std::string> pool;
        for (int i = 0; i < 6; ++i) pool.push_back("cand" + std::to_string(i));
        for (const auto& c : pool) {
            switch (rng() % 3) {
            case 0: tc.compile_fail(c, diags[rng() % diags.size()]); break;
            case 1: tc.compile_ok(c, "2\n"); tc.runner.add(candidate_digest(c), "5\n", {0, "6\n", false}); break;
            default: tc.compile_ok(c, std::to_string(rng() % 3) + "\n"); break;
            }
        }
        repo::RepairRepository repo;
        if (rng() % 2) repo.add_case(stored_case("r", "error: a", "Fix a."));
        auto local = std::make_shared<std::mt19937_64>(rng());
        FunctionClient client([&, local](std::string_view prompt) -> std::string {
            if (prompt.find("Do not write the full program yet") != std::string_view::npos) return "Analysis.";
            return fence(pool[(*local)() % pool.size()]);
        });
        auto u = unit_with("U", pool[rng() % pool.size()], kTests);
        RepairConfig cfg;
        cfg.max_iterations = max_iter;
        cfg.threshold = static_cast<double>(rng() % 5) / 4.0;
        const auto status = run_repair_loop(u, cfg, {client, &repo, tc.compiler, tc.runner});

        CHECK(u.candidates.size() <= max_iter);
        CHECK(status == u.status);
        for (std::size_t k = 0; k < u.candidates.size(); ++k) {
            const auto& r = u.candidates[k];
            CHECK(r.k == k);
            CHECK(r.evaluated);
            CHECK((r.test_result == TestResult::NotRun) == (r.compile_status == CompileStatus::Fail));
            if (k + 1 < u.candidates.size())
                CHECK(!(r.compile_status == CompileStatus::Success && r.test_result == TestResult::Pass));
        }
        const auto& last = u.candidates.back();
        if (status == UnitStatus::Accepted) {
            CHECK(last.compile_status == CompileStatus::Success);
            CHECK(last.test_result == TestResult::Pass);
            for (const auto& c : harvest_cases(u)) CHECK_NOTHROW(c.validate());
        }
        if (status == UnitStatus::Stagnated) {
            REQUIRE(u.candidates.size() >= 2);
            CHECK(last.error_signature == u.candidates[u.candidates.size() - 2].error_signature);
        }
        if (status == UnitStatus::BudgetExhausted) CHECK(u.candidates.size() == max_iter);
    }
}

TEST_CASE("trace records carry the full history") {
    ScriptedToolchain tc;
    tc.compile_fail("v0", "error: a");
    tc.compile_ok("v1", "2\n");
    tc.runner.add(candidate_digest("v1"), "5\n", {0, "6\n", false});
    ScriptedClient client({"Fix a.", fence("v1")});
    auto u = unit_with("U", "v0", kTests);
    run_repair_loop(u, {}, {client, nullptr, tc.compiler, tc.runner});

    const auto records = jsonl::parse(trace_jsonl(u));
    REQUIRE(records.size() == 3);
    CHECK(records[0]["unit"] == "U");
    CHECK(records[0]["status"] == "accepted");
    CHECK(records[1]["compile_status"] == "fail");
    CHECK(records[1]["test_result"] == "not_run");
    CHECK(records[2]["branch"] == "self_analysis");
    CHECK(records[2]["guidance"] == "Fix a.");
    CHECK(records[2]["exchanges"][0]["prompt"].get<std::string>().find("error: a") != std::string::npos);

    const auto redacted = jsonl::parse(trace_jsonl(u, true));
    CHECK(!redacted[2]["exchanges"][0].contains("prompt"));
    CHECK(redacted[2]["exchanges"][0]["prompt_digest"].get<std::string>().size() == 64);
}

TEST_CASE("mock scripts parse from JSONL") {
    const auto compiler = MockCompiler::parse(
        R"({"candidate":"a","status":"fail","diagnostics":"error: x"})" "\n"
        R"({"candidate_digest":"*","status":"success"})" "\n");
    auto& c = const_cast<MockCompiler&>(compiler);
    CHECK(c.compile("a").status == CompileStatus::Fail);
    CHECK(c.compile("a").diagnostics == "error: x");
    CHECK(c.compile("b").status == CompileStatus::Success);

    auto runner = MockRunner::parse(R"({"candidate":"b","input":"1","output":"2"})" "\n"
                                    R"({"candidate_digest":"*","input":"*","output":"","exit_code":3})" "\n");
    CHECK(runner.run(c.compile("b"), "1", std::chrono::seconds(1)).output == "2");
    CHECK(runner.run(c.compile("b"), "9", std::chrono::seconds(1)).exit_code == 3);

    CHECK_THROWS_AS(MockCompiler::parse(R"({"candidate":"a"})"), FormatError);
    CHECK_THROWS_AS(MockCompiler::parse(R"({"status":"success"})"), FormatError);
    MockCompiler empty;
    CHECK_THROWS_AS(empty.compile("x"), ToolchainError);
}

TEST_CASE("subprocess runner captures streams, exit codes and timeouts") {
    const auto r = run_process({"cat"}, "hello\n", std::chrono::seconds(5));
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text == "hello\n");
    const auto e = run_process({"sh", "-c", "echo oops >&2; exit 3"}, "", std::chrono::seconds(5));
    CHECK(e.exit_code == 3);
    CHECK(e.stderr_text == "oops\n");
    const auto t = run_process({"sleep", "5"}, "", std::chrono::milliseconds(200));
    CHECK(t.timed_out);
    CHECK_THROWS_AS(run_process({"definitely-not-a-program-xyz"}, "", std::chrono::seconds(1)), ToolchainError);

    std::string big(1 << 20, 'x');
    CHECK(run_process({"cat"}, big, std::chrono::seconds(5)).stdout_text.size() == big.size());
}

TEST_CASE("command adapters drive a shell toolchain") {
    cjtrans::testing::TempDir dir;
    // "Compiling" checks shell syntax and copies the script.
    text::write_file_atomic(dir.str("cc.sh"), "sh -n \"$1\" && cp \"$1\" \"$2\"\n");
    CommandCompiler compiler("sh " + dir.str("cc.sh") + " {source} {binary}");
    CommandRunner runner("sh {binary}");

    const auto ok = compiler.compile("read n\necho $((n + 1))\n");
    CHECK(ok.status == CompileStatus::Success);
    CHECK(runner.run(ok, "41\n", std::chrono::seconds(5)).output == "42\n");

    const auto bad = compiler.compile("if then fi (\n");
    CHECK(bad.status == CompileStatus::Fail);
    CHECK(!bad.diagnostics.empty());

    const auto slow = compiler.compile("sleep 5\n");
    CHECK(runner.run(slow, "", std::chrono::milliseconds(200)).timed_out);

    CHECK_THROWS_AS(CommandCompiler(""), ConfigError);
    CHECK_THROWS_AS(CommandCompiler("cjc main.cj"), ConfigError);
    CommandCompiler missing("no-such-compiler-xyz {source}");
    CHECK_THROWS_AS(missing.compile("x"), ToolchainError);

    CHECK(expand_command("cjc {source} -o {binary}", {{"source", "a.cj"}, {"binary", "a"}}) ==
          std::vector<std::string>{"cjc", "a.cj", "-o", "a"});
}

TEST_CASE("tests files parse") {
    const auto tests = parse_tests(R"({"input":"1\n","expected_output":"2\n"})" "\n");
    CHECK(tests == std::vector<TestCase>{{"1\n", "2\n"}});
    CHECK_THROWS_AS(parse_tests(R"({"input":"1"})"), FormatError);
}
