#pragma once

#include "cjtrans/engine/repair_loop.hpp"
#include "support/mock_clients.hpp"

#include <string>
#include <vector>

namespace cjtrans::testing {

inline std::string fence(const std::string& code) { return "```cangjie\n" + code + "\n```"; }

/// Mock toolchain keyed by candidate text.
struct ScriptedToolchain {
    engine::MockCompiler compiler;
    engine::MockRunner runner;

    void compile_fail(const std::string& candidate, const std::string& diagnostics) {
        compiler.add(engine::candidate_digest(candidate), {engine::CompileStatus::Fail, diagnostics});
    }
    /// Compiles; every input prints `output`.
    void compile_ok(const std::string& candidate, const std::string& output) {
        compiler.add(engine::candidate_digest(candidate), {engine::CompileStatus::Success, ""});
        runner.add(engine::candidate_digest(candidate), "*", {0, output, false});
    }
};

inline engine::TranslationUnit unit_with(const std::string& id, const std::string& candidate,
                                         std::vector<engine::TestCase> tests) {
    engine::TranslationUnit u;
    u.id = id;
    u.java_source = "class " + id + " { void run() { System.out.println(1); } }";
    u.tests = std::move(tests);
    engine::IterationRecord r;
    r.candidate = candidate;
    u.candidates.push_back(std::move(r));
    return u;
}

} // namespace cjtrans::testing
