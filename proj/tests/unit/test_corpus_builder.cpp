#include "doctest.h"
#include "support/mock_clients.hpp"
#include "support/test_support.hpp"

#include "cjtrans/corpus/builder.hpp"
#include "cjtrans/corpus/datasets.hpp"
#include "cjtrans/text.hpp"

#include <filesystem>

using namespace cjtrans;
using namespace cjtrans::corpus;
using cjtrans::testing::FunctionClient;
using cjtrans::testing::ScriptedClient;
using cjtrans::testing::TempDir;
using jsonl::Json;

namespace {

SyntaxEntry sample_entry() {
    return SyntaxEntry{"cj-vars-1",
                       "Immutable variables",
                       {"let", "variables"},
                       {"How do I declare a constant?", "Can a let binding be reassigned?"},
                       "A let binding cannot be reassigned after initialization.",
                       {"main() {\n    let x: Int64 = 1\n    println(x)\n}"}};
}

const std::string kSnippet = "import std.collection.*\n\nfunc sum(xs: ArrayList<Int64>): Int64 {\n"
                             "    var total = 0\n    for (x in xs) {\n        total += x\n    }\n    return total\n}\n";

std::string entries_reply(const std::vector<Json>& items) { return "```json\n" + Json(items).dump(2) + "\n```"; }

} // namespace

TEST_CASE("reconstruct_chapter parses entries and drops malformed ones") {
    const Json good1 = to_json(sample_entry());
    auto good2 = good1;
    good2["id"] = "cj-vars-2";
    ScriptedClient two({entries_reply({good1, good2})});
    const auto r = reconstruct_chapter("Variables", "# Variables\nlet and var.", two);
    CHECK(r.entries.size() == 2);
    CHECK(r.dropped == 0);
    CHECK(two.prompts.front().find("Chapter: Variables") != std::string::npos);

    auto missing_id = good2;
    missing_id.erase("id");
    ScriptedClient one({entries_reply({good1, missing_id})});
    const auto r2 = reconstruct_chapter("Variables", "text", one);
    CHECK(r2.entries.size() == 1);
    CHECK(r2.dropped == 1);
    CHECK(r2.drop_reasons.front().find("id") != std::string::npos);

    auto no_desc = good1;
    no_desc["description"] = "  ";
    auto no_examples = good2;
    no_examples["typical_questions"] = Json::array();
    no_examples["code_examples"] = Json::array();
    ScriptedClient invalid({Json({no_desc, no_examples, good1, good1}).dump()});
    const auto r3 = reconstruct_chapter("t", "text", invalid);
    CHECK(r3.entries.size() == 1);
    CHECK(r3.dropped == 3);

    ScriptedClient unused({});
    CHECK_THROWS_AS(reconstruct_chapter("t", "  \n", unused), PreconditionError);

    ScriptedClient garbage({"I cannot help with that."});
    try {
        reconstruct_chapter("t", "text", garbage);
        FAIL("expected a reconstruction error");
    } catch (const ReconstructionError& e) {
        CHECK(e.raw_reply() == "I cannot help with that.");
    }
    ScriptedClient all_bad({Json({missing_id}).dump()});
    CHECK_THROWS_AS(reconstruct_chapter("t", "text", all_bad), ReconstructionError);
    CHECK_THROWS_AS(reconstruct_chapter("t", "text", unused), AdapterError);
}

TEST_CASE("serialize_cpt matches the golden record") {
    CHECK(serialize_cpt({}).empty());
    const auto records = serialize_cpt({sample_entry()});
    REQUIRE(records.size() == 1);
    CHECK(records[0]["text"].get<std::string>() == text::read_file(cjtrans::testing::data_path("cpt_entry.golden")));
}

TEST_CASE("serialize_cpt uses identical markers in field order") {
    auto other = sample_entry();
    other.id = "cj-loops-1";
    other.title = "For-in loops";
    other.tags = {"for"};
    other.code_examples.clear();
    const auto records = serialize_cpt({sample_entry(), other});
    REQUIRE(records.size() == 2);
    const auto marker_lines = [](const std::string& t) {
        std::vector<std::string> out;
        for (const auto line : text::split_lines(t))
            if (line.starts_with("## ") || line.starts_with("<<<")) out.emplace_back(line);
        return out;
    };
    const auto m0 = marker_lines(records[0]["text"]);
    CHECK(m0 == marker_lines(records[1]["text"]));
    CHECK(m0 == std::vector<std::string>{"<<<ENTRY>>>", "## ID", "## TITLE", "## TAGS", "## QUESTIONS",
                                         "## DESCRIPTION", "## EXAMPLES", "<<<END_ENTRY>>>"});
}

TEST_CASE("entry records round-trip") {
    const auto e = sample_entry();
    CHECK(entry_from_json(Json::parse(to_json(e).dump())) == e);
    CHECK_THROWS_AS(entry_from_json(Json::parse(R"({"id":"x"})")), FormatError);
    CHECK_THROWS_AS(entry_from_json(Json::array()), FormatError);
}

TEST_CASE("filter_snippets examples") {
    const std::string four = "func f() {\n    1\n    2\n}\n";
    const std::string six_std = "import std.math.*\nfunc f(): Int64 {\n    let a = 1\n    let b = 2\n    return a + b\n}\n";
    const std::string unbalanced = "func f() {\n    if (a) {\n        b()\n    \n    c()\n    d()\n}\n";
    const std::string external = "import net.http.*\nfunc f() {\n    let a = 1\n    let b = 2\n    g(a, b)\n}\n";
    const std::string elided = "func f() {\n    let a = 1\n    ...\n    let b = 2\n    g(a, b)\n}\n";
    const std::string no_decl = "let a = 1\nlet b = 2\nlet c = 3\nlet d = 4\nlet e = 5\n";
    const std::string bad_extend = "extend Widget {\n    func draw() {\n        println(1)\n    }\n    let x = 1\n}\n";
    const std::string good_extend = "extend Int64 {\n    func twice(): Int64 {\n        this * 2\n    }\n    \n}\nmain() {\n    println(3.twice())\n}\n";
    const std::string braces_in_text = "func f() {\n    // } closing in a comment\n    let s = \"{ ( [\"\n    println(s)\n    println('}')\n}\n";

    const std::vector<std::string> in = {four, six_std, unbalanced, external, elided, no_decl, bad_extend, good_extend,
                                         braces_in_text};
    const auto r = filter_snippets(in);
    CHECK(r.retained.size() + r.rejected.size() == in.size());
    CHECK(r.retained == std::vector<std::size_t>{1, 7, 8});
    std::map<std::size_t, RejectReason> reasons;
    for (const auto& x : r.rejected) reasons[x.index] = x.reason;
    CHECK(reasons.at(0) == RejectReason::TooShort);
    CHECK(reasons.at(2) == RejectReason::Incomplete);
    CHECK(reasons.at(3) == RejectReason::ExternalDependency);
    CHECK(reasons.at(4) == RejectReason::Incomplete);
    CHECK(reasons.at(5) == RejectReason::Incomplete);
    CHECK(reasons.at(6) == RejectReason::Incomplete);

    ImportAllowlist allow = ImportAllowlist::parse("# allowed\nstd\nnet\n");
    CHECK(!check_snippet(external, allow).has_value());
    CHECK(allow.allows("std.collection"));
    CHECK(!allow.allows("stdx.collection"));
}

TEST_CASE("filter_snippets conserves counts on random input") {
    std::mt19937_64 rng(4);
    const std::vector<std::string> pieces = {"func f() {", "}", "let a = 1", "import std.io.*", "import ext.lib.*",
                                             "(", ")", "", "class A {", "// note {", "\"}\""};
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> snippets;
        for (auto n = rng() % 10; n > 0; --n) {
            std::string s;
            for (auto k = rng() % 12; k > 0; --k) s += pieces[rng() % pieces.size()] + "\n";
            snippets.push_back(s);
        }
        const auto r = filter_snippets(snippets);
        CHECK(r.retained.size() + r.rejected.size() == snippets.size());
        for (const auto idx : r.retained) CHECK(text::split_lines(snippets[idx]).size() >= kMinSnippetLines);
    }
}

TEST_CASE("first_sentence trimming") {
    CHECK(first_sentence("Compute the sum of a list.") == "Compute the sum of a list.");
    CHECK(first_sentence("Compute the sum. Then print it.") == "Compute the sum.");
    CHECK(first_sentence("  Return xs.size plus one!  More text.") == "Return xs.size plus one!");
    CHECK(first_sentence("Print \"done. ok\" to the console. Next.") == "Print \"done. ok\" to the console.");
    CHECK(first_sentence("Sort the array\nin place. Extra") == "Sort the array in place.");
    CHECK(first_sentence("计算列表之和。然后打印") == "计算列表之和。");
    CHECK(first_sentence("No terminator") == "No terminator");
    CHECK(first_sentence("   ").empty());
}

TEST_CASE("annotate_snippet") {
    ScriptedClient one({"Compute the sum of a list."});
    CHECK(annotate_snippet(kSnippet, one) == "Compute the sum of a list.");
    CHECK(one.prompts.front().find(kSnippet) != std::string::npos);

    ScriptedClient two({"Compute the sum of a list. It uses a loop."});
    CHECK(annotate_snippet(kSnippet, two) == "Compute the sum of a list.");

    ScriptedClient empty({"  \n"});
    CHECK_THROWS_AS(annotate_snippet(kSnippet, empty), FormatError);
    ScriptedClient unused({});
    CHECK_THROWS_AS(annotate_snippet("func f() {}", unused), PreconditionError);
}

TEST_CASE("monolingual samples validate and round-trip") {
    const MonolingualSample s{"Write code.", "Compute the sum of a list.", kSnippet};
    CHECK(monolingual_from_json(Json::parse(to_json(s).dump())) == s);
    CHECK_THROWS_AS((MonolingualSample{"Write code.", "One. Two.", kSnippet}.validate()), FormatError);
    CHECK_THROWS_AS((MonolingualSample{"Write code.", "One.", "a\nb"}.validate()), FormatError);
}

TEST_CASE("build_parallel_sample") {
    const auto vocab = ast::StructuralTokenVocab::default_vocab();
    const auto s = build_parallel_sample("void f(int x) { return; }", "func f(x: Int64) { return }", vocab);
    REQUIRE(!s.structure_block.empty());
    CHECK(s.structure_block.front() == "<STRUCT:METHOD>");

    const auto c = build_parallel_sample("class A {}", "class A {}", vocab);
    CHECK(c.structure_block == std::vector<std::string>{"<STRUCT:CLASS>", "<STRUCT:CLASS_BODY>"});
    CHECK(parallel_from_json(Json::parse(to_json(c).dump())) == c);

    // The prompt carries the same tokens the summarizer produces.
    const auto blocks = ast::extract_blocks(c.prompt());
    CHECK(blocks.tokens == c.structure_block);
    CHECK(blocks.source == "class A {}");

    CHECK_THROWS_AS(build_parallel_sample("", "x", vocab), PreconditionError);
    CHECK_THROWS_AS(build_parallel_sample("class A {}", " ", vocab), PreconditionError);
    CHECK_THROWS_AS(build_parallel_sample("int x = ;", "x", vocab), PreconditionError);
    CHECK_THROWS_AS(build_parallel_sample("class A {} // <<<CODE>>>", "x", vocab), PreconditionError);
}

TEST_CASE("build_corpus writes datasets and reruns identically") {
    TempDir dir;
    namespace fs = std::filesystem;
    fs::create_directories(dir.path() / "chapters");
    fs::create_directories(dir.path() / "snippets");
    fs::create_directories(dir.path() / "pairs");
    text::write_file_atomic(dir.str("chapters/01-vars.md"), "# Variables\nUse let for constants.\n");
    text::write_file_atomic(dir.str("chapters/02-broken.md"), "# Broken\nThe model fails here.\n");
    text::write_file_atomic(dir.str("snippets/a.cj"), kSnippet);
    text::write_file_atomic(dir.str("snippets/b.cj"), "func f() {}\n");
    text::write_file_atomic(dir.str("pairs/Max.java"),
                            "class Max { int max(int a, int b) { if (a > b) { return a; } return b; } }");
    text::write_file_atomic(dir.str("pairs/Max.cj"), "func max(a: Int64, b: Int64): Int64 { if (a > b) { a } else { b } }");
    text::write_file_atomic(dir.str("pairs/Orphan.java"), "class Orphan {}");

    FunctionClient client([](std::string_view prompt) -> std::string {
        if (prompt.find("Chapter: Variables") != std::string_view::npos)
            return entries_reply({to_json(sample_entry())});
        if (prompt.find("Chapter: Broken") != std::string_view::npos) return "not json";
        return "Compute the sum of a list of integers.";
    });

    CorpusInputs in;
    in.chapters_dir = dir.str("chapters");
    in.snippets_dir = dir.str("snippets");
    in.parallel_dir = dir.str("pairs");
    in.jobs = 3;
    const auto stats = build_corpus(in, dir.str("out1"), client);
    CHECK(stats.chapters == 2);
    CHECK(stats.entries == 1);
    CHECK(stats.snippets == 2);
    CHECK(stats.retained_snippets == 1);
    CHECK(stats.rejected_by_reason.at("too_short") == 1);
    CHECK(stats.monolingual == 1);
    CHECK(stats.parallel == 1);
    REQUIRE(stats.errors.size() == 2);
    CHECK(stats.errors[0].file == "02-broken.md");
    CHECK(stats.errors[1].file == "Orphan.java");

    build_corpus(in, dir.str("out2"), client);
    for (const auto name : {kCptFile, kEntriesFile, kMonolingualFile, kParallelFile, kRejectedFile, kStatsFile}) {
        const auto a = text::read_file(dir.str("out1/" + std::string(name)));
        CHECK(a == text::read_file(dir.str("out2/" + std::string(name))));
    }
    // Persisted records parse back to equal values.
    const auto entries = jsonl::read(dir.str("out1/syntax_entries.jsonl"));
    REQUIRE(entries.size() == 1);
    CHECK(entry_from_json(entries[0]) == sample_entry());
    const auto mono = jsonl::read(dir.str("out1/monolingual.jsonl"));
    CHECK(monolingual_from_json(mono.at(0)).output == kSnippet);
    const auto par = jsonl::read(dir.str("out1/parallel.jsonl"));
    CHECK(parallel_from_json(par.at(0)).java_source.starts_with("class Max"));

    fs::create_directories(dir.path() / "empty");
    in.chapters_dir = dir.str("empty");
    CHECK_THROWS_AS(build_corpus(in, dir.str("out3"), client), PreconditionError);
    in.chapters_dir = dir.str("missing");
    CHECK_THROWS_AS(build_corpus(in, dir.str("out3"), client), PreconditionError);
}
