#pragma once

#include "cjtrans/engine/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cjtrans::engine {

struct CompileResult {
    CompileStatus status = CompileStatus::Fail;
    std::string diagnostics;
    /// What the runner executes: a binary path for real toolchains, the
    /// candidate digest for mocks.
    std::string artifact;
    /// Keeps build outputs alive until the result is dropped.
    std::shared_ptr<void> keepalive;
};

struct RunResult {
    int exit_code = 0;
    std::string output;
    bool timed_out = false;
};

/// Compiles a candidate. A compile error is a Fail result; a toolchain that
/// cannot be invoked raises ToolchainError. Must be safe for concurrent calls.
class Compiler {
public:
    virtual ~Compiler() = default;
    virtual CompileResult compile(const std::string& candidate) = 0;
};

/// Runs a compiled candidate on one test input.
class Runner {
public:
    virtual ~Runner() = default;
    virtual RunResult run(const CompileResult& compiled, const std::string& input,
                          std::chrono::milliseconds timeout) = 0;
};

/// Whitespace-separated argument template with `{source}`, `{binary}` and
/// `{dir}` placeholders, e.g. `cjc {source} -o {binary}`.
std::vector<std::string> expand_command(std::string_view command_template, const std::map<std::string, std::string>& vars);

/// Writes the candidate to `main.cj` in a fresh directory and runs the
/// compiler command there. Exit code 0 is success; diagnostics come from
/// standard error, or standard output when standard error is empty.
class CommandCompiler final : public Compiler {
public:
    /// Throws ConfigError for an empty template or one without `{source}`.
    explicit CommandCompiler(std::string command_template,
                             std::chrono::milliseconds timeout = std::chrono::minutes(2));
    CompileResult compile(const std::string& candidate) override;

private:
    std::string template_;
    std::chrono::milliseconds timeout_;
};

/// Runs the runner command (default `{binary}`) with the test input on stdin.
class CommandRunner final : public Runner {
public:
    explicit CommandRunner(std::string command_template = "{binary}");
    RunResult run(const CompileResult& compiled, const std::string& input, std::chrono::milliseconds timeout) override;

private:
    std::string template_;
};

/// Scripted compiler. Records are `{candidate_digest | candidate, status,
/// diagnostics}`; a record with `"candidate_digest": "*"` matches anything.
/// Exact digest matches win over the wildcard. A candidate with no match
/// raises ToolchainError.
class MockCompiler final : public Compiler {
public:
    struct Rule {
        CompileStatus status = CompileStatus::Success;
        std::string diagnostics;
    };
    MockCompiler() = default;
    static MockCompiler parse(std::string_view content);
    static MockCompiler load(const std::string& path);
    void add(std::string digest_or_wildcard, Rule rule);
    CompileResult compile(const std::string& candidate) override;

private:
    std::map<std::string, Rule> rules_;
};

/// Scripted runner. Records are `{candidate_digest | candidate, input,
/// output, exit_code?, timeout?}`; `"*"` works as a wildcard for either key.
class MockRunner final : public Runner {
public:
    MockRunner() = default;
    static MockRunner parse(std::string_view content);
    static MockRunner load(const std::string& path);
    void add(std::string digest_or_wildcard, std::string input_or_wildcard, RunResult result);
    RunResult run(const CompileResult& compiled, const std::string& input, std::chrono::milliseconds timeout) override;

private:
    std::map<std::pair<std::string, std::string>, RunResult> rules_;
};

/// Digest used to key mock scripts.
std::string candidate_digest(std::string_view candidate);

} // namespace cjtrans::engine
