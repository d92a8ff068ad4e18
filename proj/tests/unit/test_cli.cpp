#include "doctest.h"
#include "support/mock_clients.hpp"
#include "support/test_support.hpp"

#include "cjtrans/cli/benchmark.hpp"
#include "cjtrans/cli/commands.hpp"
#include "cjtrans/cli/config.hpp"
#include "cjtrans/corpus/builder.hpp"
#include "cjtrans/text.hpp"

#include <filesystem>
#include <sstream>

using namespace cjtrans;
using namespace cjtrans::cli;
using cjtrans::testing::data_path;
using cjtrans::testing::TempDir;
using jsonl::Json;
namespace fs = std::filesystem;

namespace {

EnvLookup no_env() {
    return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args, const EnvLookup& env = no_env()) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err, env);
    return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name = {}) {
    return data_path("scenario") + (name.empty() ? "" : "/" + name);
}

} // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"({
        "paths": {"benchmark": "bench", "repository": "/abs/repo.jsonl"},
        "llm": {"transcript": "t.jsonl", "temperature": 0.2},
        "repair": {"threshold": 0.25, "max_iterations": 3, "weights": [1, 1, 0, 0, 0, 2]},
        "retained_node_kinds": ["class_declaration", "method_declaration"],
        "jobs": 2
    })", "/base", no_env());
    CHECK(cfg.paths.benchmark == "/base/bench");
    CHECK(cfg.paths.repository == "/abs/repo.jsonl");
    CHECK(cfg.paths.reports == "/base/reports");
    CHECK(cfg.llm.transcript == "/base/t.jsonl");
    CHECK(cfg.repair.decoding.temperature == 0.2);
    CHECK(cfg.repair.threshold == 0.25);
    CHECK(cfg.repair.max_iterations == 3);
    CHECK(cfg.repair.weights[repo::Dimension::EditDistance] == 0.5);
    CHECK(cfg.retained.size() == 2);
    CHECK(cfg.jobs == 2);

    const auto defaults = parse_config("", "/base", no_env());
    CHECK(defaults.repair.threshold == 0.5);
    CHECK(defaults.repair.max_iterations == 5);
    CHECK(defaults.repair.top_k == 3);
    CHECK(defaults.repair.test_timeout == std::chrono::seconds(10));
    CHECK(defaults.llm.decoding.temperature == 0.0);

    CHECK_THROWS_AS(parse_config(R"({"colour": 1})", "/", no_env()), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repair": {"tau": 1}})", "/", no_env()), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repair": {"threshold": 2}})", "/", no_env()), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repair": {"max_iterations": "five"}})", "/", no_env()), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repair": {"weights": [1, 2]}})", "/", no_env()), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"retained_node_kinds": []})", "/", no_env()), ConfigError);
    CHECK_THROWS_AS(parse_config("{", "/", no_env()), ConfigError);
}

TEST_CASE("environment overrides endpoint credentials") {
    const EnvLookup env = [](const std::string& k) -> std::optional<std::string> {
        if (k == "CJTRANS_LLM_ENDPOINT") return "http://127.0.0.1:9/v1/chat/completions";
        if (k == "CJTRANS_LLM_API_KEY") return "secret";
        if (k == "CJTRANS_LLM_MODEL") return "m";
        return std::nullopt;
    };
    const auto cfg = parse_config(R"({"llm": {"endpoint": "http://file", "model": "file-model"}})", "/", env);
    CHECK(cfg.llm.endpoint == "http://127.0.0.1:9/v1/chat/completions");
    CHECK(cfg.llm.api_key == "secret");
    CHECK(cfg.llm.model == "m");
    CHECK(make_client(cfg) != nullptr);
    CHECK_THROWS_AS(make_client(parse_config("", "/", no_env())), ConfigError);
}

TEST_CASE("benchmark loading") {
    const auto units = load_benchmark(scenario("bench"));
    REQUIRE(units.size() == 4);
    CHECK(units[0].id == "accept_first");
    CHECK(units[0].tests.size() == 10);
    CHECK(units[0].reference.has_value());

    TempDir dir;
    fs::create_directories(dir.path() / "u1");
    CHECK_THROWS_AS(load_benchmark(dir.str()), FormatError);
    CHECK_THROWS_AS(load_benchmark(dir.str("missing")), PreconditionError);
}

TEST_CASE("repair exits with a configuration error when no compiler is set") {
    TempDir dir;
    text::write_file_atomic(dir.str("c.json"), R"({"paths": {"benchmark": ")" + scenario("bench") +
                                                   R"("}, "llm": {"transcript": ")" + scenario("transcript.jsonl") + R"("}})");
    const auto r = run({"--config", dir.str("c.json"), "repair", "--out", dir.str("out")});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("no compiler configured") != std::string::npos);
    CHECK(!fs::exists(dir.path() / "out"));

    CHECK(run({"--config", dir.str("missing.json"), "repair"}).code == kExitConfig);
    CHECK(run({"no-such-command"}).code == kExitConfig);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("repair --no-repair evaluates only the initial translation") {
    TempDir dir;
    fs::copy_file(scenario("repository.jsonl"), dir.path() / "repo.jsonl");
    const auto r = run({"--config", scenario("config.json"), "repair", "--no-repair", "--out", dir.str("out"),
                        "--repository", dir.str("repo.jsonl")});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("accepted 1\n") != std::string::npos);
    CHECK(r.out.find("budget_exhausted 3\n") != std::string::npos);
    for (const auto& rec : jsonl::read(dir.str("out/outcomes.jsonl"))) CHECK(rec["iterations"] == 1);
    for (const auto& f : corpus::list_files(dir.str("out/traces"), ".jsonl")) CHECK(jsonl::read(f).size() == 2);
}

TEST_CASE("repair reports units that hit adapter errors") {
    TempDir dir;
    // An empty transcript makes every translation miss.
    text::write_file_atomic(dir.str("empty.jsonl"), "");
    text::write_file_atomic(dir.str("c.json"), R"({"paths": {"benchmark": ")" + scenario("bench") +
                                                   R"("}, "llm": {"transcript": ")" + dir.str("empty.jsonl") +
                                                   R"("}, "toolchain": {"mock_compiler": ")" +
                                                   scenario("mock_compiler.jsonl") + R"("}})");
    const auto r = run({"--config", dir.str("c.json"), "repair", "--out", dir.str("out")});
    CHECK(r.code == kExitPartial);
    CHECK(r.out.find("errored 4") != std::string::npos);
    CHECK(r.err.find("transcript miss") != std::string::npos);
    const auto outcomes = jsonl::read(dir.str("out/outcomes.jsonl"));
    CHECK(outcomes.size() == 4);
    CHECK(outcomes[0]["status"] == "error");
}

TEST_CASE("evaluate on 165 units with 118 compiled and 105 passing") {
    TempDir dir;
    std::vector<Json> outcomes;
    fs::create_directories(dir.path() / "refs");
    for (int i = 0; i < 165; ++i) {
        const auto id = "u" + std::to_string(i);
        outcomes.push_back(Json{{"id", id}, {"compiled", i < 118}, {"all_tests_passed", i < 105}, {"candidate", "let x = 1"}});
        text::write_file_atomic(dir.str("refs/" + id + ".cj"), "let x = 1");
    }
    jsonl::write(dir.str("outcomes.jsonl"), outcomes);
    const auto r = run({"evaluate", "--outcomes", dir.str("outcomes.jsonl"), "--refs", dir.str("refs"), "--out", dir.str("rep")});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FE        63.64  105/165") != std::string::npos);
    CHECK(r.out.find("CSR       71.52  118/165") != std::string::npos);
    CHECK(r.out.find("CFE       88.98  105/118") != std::string::npos);
    CHECK(r.out.find("BLEU     100.00") != std::string::npos);
    CHECK(fs::exists(dir.path() / "rep" / "report.jsonl"));

    fs::remove(dir.path() / "refs" / "u7.cj");
    const auto missing = run({"evaluate", "--outcomes", dir.str("outcomes.jsonl"), "--refs", dir.str("refs"), "--out", dir.str("rep")});
    CHECK(missing.code == kExitConfig);
    CHECK(missing.err.find("no reference for unit u7") != std::string::npos);
}

TEST_CASE("repo add and search") {
    TempDir dir;
    const auto repo_file = dir.str("repo.jsonl");
    const auto added = run({"repo", "add", "--cases", scenario("repository.jsonl"), "--repository", repo_file});
    CHECK(added.code == kExitOk);
    CHECK(added.out == "added 3\nsize 3\n");
    CHECK(run({"repo", "add", "--cases", scenario("repository.jsonl"), "--repository", repo_file}).code == kExitConfig);

    text::write_file_atomic(dir.str("diag.txt"), "error: mismatched types\n ==> main.cj:1:5:\nexpected 'Int64', found 'Option<String>'");
    const auto found = run({"repo", "search", "--diagnostics", dir.str("diag.txt"), "--top-k", "2", "--repository", repo_file});
    CHECK(found.code == kExitOk);
    const auto records = jsonl::parse(found.out);
    REQUIRE(records.size() == 2);
    CHECK(records[0]["id"] == "seed-mismatch-option");
    CHECK(records[0]["scores"].size() == 6);
}

TEST_CASE("summarize-ast prints categories, tokens and prompts") {
    TempDir dir;
    text::write_file_atomic(dir.str("A.java"), "class A {}");
    CHECK(run({"summarize-ast", dir.str("A.java")}).out == "class_declaration\nclass_body\n");
    CHECK(run({"summarize-ast", "--tokens", dir.str("A.java")}).out == "<STRUCT:CLASS> <STRUCT:CLASS_BODY>\n");
    const auto p = run({"summarize-ast", "--prompt", dir.str("A.java")}).out;
    CHECK(ast::extract_blocks(p).source == "class A {}");
}

TEST_CASE("build-corpus replays a transcript") {
    TempDir dir;
    fs::create_directories(dir.path() / "chapters");
    text::write_file_atomic(dir.str("chapters/a.md"), "# Functions\nfunc declares a function.\n");
    text::write_file_atomic(dir.str("chapters/b.md"), "# Loops\nfor-in iterates a range.\n");

    // Record replies once, then replay them through the CLI.
    auto inner = std::make_shared<cjtrans::testing::FunctionClient>([](std::string_view prompt) {
        const auto title = prompt.find("Chapter: Functions") != std::string_view::npos ? "fn" : "loop";
        return Json::array({Json{{"id", std::string("cj-") + title},
                                 {"title", title},
                                 {"tags", {title}},
                                 {"typical_questions", {"How?"}},
                                 {"description", "Explains it."},
                                 {"code_examples", Json::array()}}})
            .dump();
    });
    llm::RecordingClient recorder(inner, dir.str("transcript.jsonl"));
    corpus::CorpusInputs in;
    in.chapters_dir = dir.str("chapters");
    corpus::build_corpus(in, dir.str("direct"), recorder);

    text::write_file_atomic(dir.str("c.json"), R"({"paths": {"chapters": "chapters"}, "llm": {"transcript": "transcript.jsonl"}})");
    const auto r1 = run({"--config", dir.str("c.json"), "build-corpus", "--out", dir.str("out1")});
    const auto r2 = run({"--config", dir.str("c.json"), "build-corpus", "--out", dir.str("out2"), "--jobs", "2"});
    CHECK(r1.code == kExitOk);
    CHECK(r1.out.find("entries 2\n") != std::string::npos);
    CHECK(r2.code == kExitOk);
    for (const auto* f : {"cpt.jsonl", "syntax_entries.jsonl", "stats.json"}) {
        CHECK(text::read_file(dir.str(std::string("out1/") + f)) == text::read_file(dir.str(std::string("out2/") + f)));
        CHECK(text::read_file(dir.str(std::string("out1/") + f)) == text::read_file(dir.str(std::string("direct/") + f)));
    }

    fs::create_directories(dir.path() / "nothing");
    CHECK(run({"--config", dir.str("c.json"), "build-corpus", "--chapters", dir.str("nothing"), "--out", dir.str("o")}).code ==
          kExitConfig);
}
