// Writes the scripted benchmark used by the acceptance suite: benchmark
// units, mock compiler/runner scripts, a seed repository and the model
// transcript. Usage: make_scenario <output-dir>
#include "cjtrans/engine/repair_loop.hpp"
#include "cjtrans/text.hpp"
#include "support/mock_clients.hpp"

#include <filesystem>
#include <iostream>

using namespace cjtrans;
using cjtrans::jsonl::Json;
namespace fs = std::filesystem;

namespace {

struct Candidate {
    std::string code;
    // Empty diagnostics means it compiles.
    std::string diagnostics;
    // Output for input i (0-based) when it compiles.
    std::function<std::string(int)> output;
};

struct Unit {
    std::string id;
    std::string java;
    std::function<std::string(int)> input;
    std::function<std::string(int)> expected;
    std::vector<Candidate> candidates;
    // Model replies in call order (translation first).
    std::vector<std::string> replies;
};

std::string fence(const std::string& code) { return "```cangjie\n" + code + "```\n"; }

constexpr int kTests = 10;

std::vector<Unit> units() {
    std::vector<Unit> out;

    // Accepted at the first evaluation.
    {
        Unit u;
        u.id = "accept_first";
        u.java = "import java.util.Scanner;\n\npublic class Doubler {\n    public static void main(String[] args) {\n"
                 "        Scanner in = new Scanner(System.in);\n        int n = in.nextInt();\n"
                 "        System.out.println(n * 2);\n    }\n}\n";
        u.input = [](int i) { return std::to_string(i * 3) + "\n"; };
        u.expected = [](int i) { return std::to_string(i * 6) + "\n"; };
        const std::string c0 = "import std.console.*\nimport std.convert.*\n\nmain() {\n"
                               "    let n = Int64.parse(Console.stdIn.readln().getOrThrow().trimAscii())\n"
                               "    println(n * 2)\n}\n";
        u.candidates = {{c0, "", [](int i) { return std::to_string(i * 6) + "\n"; }}};
        u.replies = {"Here is the translation.\n" + fence(c0)};
        out.push_back(u);
    }

    // Self-analysis fix, test repair, then a retrieval-augmented fix.
    {
        Unit u;
        u.id = "mixed_fixes";
        u.java = "import java.util.Scanner;\n\npublic class SumTo {\n    public static void main(String[] args) {\n"
                 "        Scanner in = new Scanner(System.in);\n        int n = in.nextInt();\n        int total = 0;\n"
                 "        for (int i = 1; i <= n; i++) {\n            total += i;\n        }\n"
                 "        System.out.println(total);\n    }\n}\n";
        u.input = [](int i) { return std::to_string(i) + "\n"; };
        u.expected = [](int i) { return std::to_string(i * (i + 1) / 2) + "\n"; };
        const std::string c0 = "import std.console.*\nimport std.convert.*\n\nmain() {\n"
                               "    let n = Int64.parse(Console.stdIn.readln().getOrThrow().trimAscii())\n"
                               "    let total = 0\n    for (i in 1..n) {\n        total += i\n    }\n"
                               "    println(total)\n}\n";
        const std::string c1 = "import std.console.*\nimport std.convert.*\n\nmain() {\n"
                               "    let n = Int64.parse(Console.stdIn.readln().getOrThrow().trimAscii())\n"
                               "    var total = 0\n    for (i in 1..n) {\n        total += i\n    }\n"
                               "    println(total)\n}\n";
        const std::string c2 = "import std.console.*\nimport std.convert.*\n\nmain() {\n"
                               "    let n: Int64 = Console.stdIn.readln()\n"
                               "    var total = 0\n    for (i in 1..=n) {\n        total += i\n    }\n"
                               "    println(total)\n}\n";
        const std::string c3 = "import std.console.*\nimport std.convert.*\n\nmain() {\n"
                               "    let n: Int64 = Int64.parse(Console.stdIn.readln().getOrThrow().trimAscii())\n"
                               "    var total = 0\n    for (i in 1..=n) {\n        total += i\n    }\n"
                               "    println(total)\n}\n";
        u.candidates = {
            {c0, "error: cannot assign to immutable value\n ==> main.cj:8:9:\n  |\n8 |         total += i\n  |         ^^^^^ \n  |\n", nullptr},
            {c1, "", [](int i) { return std::to_string(i * (i - 1) / 2) + "\n"; }},
            {c2, "error: mismatched types\n ==> main.cj:5:20:\n  |\n5 |     let n: Int64 = Console.stdIn.readln()\n"
                 "  |                    ^^^^^^^^^^^^^^^^^^^^^^ expected 'Int64', found 'Option<String>'\n  |\n", nullptr},
            {c3, "", [](int i) { return std::to_string(i * (i + 1) / 2) + "\n"; }},
        };
        u.replies = {
            fence(c0),
            "The variable total is declared with let, so it is immutable and cannot be updated inside the loop. "
            "Declare it with var instead.",
            fence(c1),
            "The Java loop runs while i <= n, but the Cangjie range 1..n excludes n. Use the closed range 1..=n.",
            fence(c2),
            fence(c3),
        };
        out.push_back(u);
    }

    // The same compile error survives a repair.
    {
        Unit u;
        u.id = "stuck";
        u.java = "import java.util.Scanner;\n\npublic class Reverse {\n    public static void main(String[] args) {\n"
                 "        Scanner in = new Scanner(System.in);\n        String s = in.nextLine();\n"
                 "        System.out.println(new StringBuilder(s).reverse());\n    }\n}\n";
        u.input = [](int i) { return std::string(static_cast<std::size_t>(i + 1), 'a') + "b\n"; };
        u.expected = [](int i) { return "b" + std::string(static_cast<std::size_t>(i + 1), 'a') + "\n"; };
        const std::string c0 = "import std.console.*\n\nmain() {\n    let s = Console.stdIn.readln().getOrThrow()\n"
                               "    println(StringBuilder(s).reverse())\n}\n";
        const std::string c1 = "import std.console.*\n\nmain() {\n    // reverse the line\n"
                               "    let s = Console.stdIn.readln().getOrThrow()\n"
                               "    println(StringBuilder(s).reverse())\n}\n";
        u.candidates = {
            {c0, "error: undeclared identifier 'StringBuilder'\n ==> main.cj:5:13:\n  |\n5 |     println(StringBuilder(s).reverse())\n  |             ^^^^^^^^^^^^^ \n  |\n", nullptr},
            {c1, "error: undeclared identifier 'StringBuilder'\n ==> main.cj:6:13:\n  |\n6 |     println(StringBuilder(s).reverse())\n  |             ^^^^^^^^^^^^^ \n  |\n", nullptr},
        };
        u.replies = {fence(c0), "StringBuilder lives in std.core; it needs no import but reverse() does not exist.",
                     fence(c1)};
        out.push_back(u);
    }

    // Two errors alternate until the budget runs out.
    {
        Unit u;
        u.id = "cycling";
        u.java = "public class Hello {\n    public static void main(String[] args) {\n"
                 "        System.out.println(\"hello\");\n    }\n}\n";
        u.input = [](int) { return std::string(); };
        u.expected = [](int) { return std::string("hello\n"); };
        const std::string a = "main() {\n    println(\"hello\")\n    return 0\n}\n";
        const std::string b = "main(): Int64 {\n    println(\"hello\")\n}\n";
        const std::string diag_a = "error: return type of main must be Int64 or Unit, found Int64 literal without declared return type\n ==> main.cj:3:5:\n";
        const std::string diag_b = "error: missing return value of type Int64 in function 'main'\n ==> main.cj:1:1:\n";
        u.candidates = {{a, diag_a, nullptr}, {b, diag_b, nullptr}};
        u.replies = {fence(a)};
        for (int k = 0; k < 4; ++k) {
            u.replies.push_back(k % 2 == 0 ? "Declare the return type of main explicitly."
                                           : "Return a value from main or drop the return type.");
            u.replies.push_back(fence(k % 2 == 0 ? b : a));
        }
        out.push_back(u);
    }
    return out;
}

std::vector<repo::RepairCase> seed_cases() {
    return {
        {"seed-mismatch-option",
         {"type-mismatch"},
         "error: mismatched types\n ==> main.cj:4:20:\n  |\n4 |     let n: Int64 = Console.stdIn.readln()\n"
         "  |                    ^^^^^^^^^^^^^^^^^^^^^^ expected 'Int64', found 'Option<String>'\n  |\n",
         "readln() returns Option<String>. Unwrap it with getOrThrow(), trim it, and convert it with Int64.parse.",
         "    let n: Int64 = Console.stdIn.readln()",
         "    let n: Int64 = Int64.parse(Console.stdIn.readln().getOrThrow().trimAscii())"},
        {"seed-import",
         {"import"},
         "error: cannot find package 'java.util'\n ==> main.cj:1:8:\n",
         "Java packages do not exist in Cangjie. Remove the import and use std.collection instead.",
         "import java.util.*",
         "import std.collection.*"},
        {"seed-args",
         {"call-arguments"},
         "error: wrong number of arguments in call to 'substring', expected 1, found 2\n ==> main.cj:6:15:\n",
         "Cangjie strings are sliced with ranges: s[start..end].",
         "    let t = s.substring(1, 3)",
         "    let t = s[1..3]"},
    };
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_scenario <output-dir>\n";
        return 1;
    }
    const fs::path root(argv[1]);
    repo::RepairRepository repository;
    for (auto& c : seed_cases()) repository.add_case(c);
    repository.save((root / "repository.jsonl").string());

    std::vector<Json> compiler_script, runner_script;
    llm::Transcript transcript;
    for (const auto& u : units()) {
        const auto dir = root / "bench" / u.id;
        fs::create_directories(dir);
        text::write_file_atomic((dir / "Main.java").string(), u.java);
        std::vector<Json> tests;
        for (int i = 0; i < kTests; ++i) tests.push_back(Json{{"input", u.input(i)}, {"expected_output", u.expected(i)}});
        jsonl::write((dir / "tests.jsonl").string(), tests);
        text::write_file_atomic((dir / "reference.cj").string(), u.candidates.back().code);


        engine::MockCompiler compiler;
        engine::MockRunner runner;
        for (auto c : u.candidates) {
            // Candidates are stored the way they come out of a fenced reply.
            c.code = llm::extract_code_block(fence(c.code));
            const bool ok = c.diagnostics.empty();
            compiler_script.push_back(
                Json{{"candidate", c.code}, {"status", ok ? "success" : "fail"}, {"diagnostics", c.diagnostics}});
            compiler.add(engine::candidate_digest(c.code),
                         {ok ? engine::CompileStatus::Success : engine::CompileStatus::Fail, c.diagnostics});
            if (!ok) continue;
            for (int i = 0; i < kTests; ++i) {
                runner_script.push_back(Json{{"candidate", c.code}, {"input", u.input(i)}, {"output", c.output(i)}});
                runner.add(engine::candidate_digest(c.code), u.input(i), {0, c.output(i), false});
            }
        }

        auto scripted = std::make_shared<cjtrans::testing::ScriptedClient>(u.replies);
        llm::RecordingClient recorder(scripted);
        engine::TranslationUnit unit;
        unit.id = u.id;
        unit.java_source = u.java;
        for (int i = 0; i < kTests; ++i) unit.tests.push_back({u.input(i), u.expected(i)});
        unit.candidates.push_back(engine::translate(u.java, recorder, ast::StructuralTokenVocab::default_vocab()));
        try {
            engine::run_repair_loop(unit, {}, {recorder, &repository, compiler, runner});
        } catch (const Error& e) {
            std::cerr << u.id << ": " << e.what() << "\n";
            for (const auto& r : unit.candidates)
                std::cerr << "  k=" << r.k << " " << engine::name(r.branch)
                          << (r.top_score ? " top=" + std::to_string(*r.top_score) : "") << "\n";
            return 1;
        }
        const auto recorded = recorder.transcript();
        for (const auto& [digest, entry] : recorded.entries()) transcript.put(entry.prompt, entry.reply);

        std::cout << u.id << ": " << engine::name(unit.status) << " after " << unit.candidates.size()
                  << " iterations, unused replies " << scripted->remaining() << "\n";
        for (const auto& r : unit.candidates)
            std::cout << "  k=" << r.k << " " << engine::name(r.branch)
                      << (r.top_score ? " top=" + std::to_string(*r.top_score) : "") << "\n";
    }
    jsonl::write((root / "mock_compiler.jsonl").string(), compiler_script);
    jsonl::write((root / "mock_runner.jsonl").string(), runner_script);
    transcript.save((root / "transcript.jsonl").string());
    return 0;
}
