#include "cjtrans/engine/toolchain.hpp"

#include "cjtrans/engine/process.hpp"
#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace cjtrans::engine {

namespace fs = std::filesystem;
using jsonl::Json;

std::string candidate_digest(std::string_view candidate) { return text::sha256_hex(candidate); }

std::vector<std::string> expand_command(std::string_view command_template,
                                        const std::map<std::string, std::string>& vars) {
    std::vector<std::string> out;
    std::istringstream in{std::string(command_template)};
    for (std::string word; in >> word;) {
        for (const auto& [key, value] : vars) {
            const auto placeholder = "{" + key + "}";
            for (auto pos = word.find(placeholder); pos != std::string::npos; pos = word.find(placeholder, pos + value.size()))
                word.replace(pos, placeholder.size(), value);
        }
        out.push_back(std::move(word));
    }
    return out;
}

namespace {

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        auto pattern = (fs::temp_directory_path() / "cjtrans-build-XXXXXX").string();
        if (!::mkdtemp(pattern.data())) throw ToolchainError("cannot create a build directory");
        path = pattern;
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string key_of(const Json& j, const std::string& origin) {
    if (j.contains("candidate_digest") && j["candidate_digest"].is_string()) return j["candidate_digest"].get<std::string>();
    if (j.contains("candidate") && j["candidate"].is_string()) return candidate_digest(j["candidate"].get<std::string>());
    throw FormatError(origin + ": record needs candidate_digest or candidate");
}

} // namespace

CommandCompiler::CommandCompiler(std::string command_template, std::chrono::milliseconds timeout)
    : template_(std::move(command_template)), timeout_(timeout) {
    if (text::trim(template_).empty()) throw ConfigError("compiler command is empty");
    if (template_.find("{source}") == std::string::npos) throw ConfigError("compiler command lacks {source}");
}

CompileResult CommandCompiler::compile(const std::string& candidate) {
    auto dir = std::make_shared<ScratchDir>();
    const auto source = (dir->path / "main.cj").string();
    const auto binary = (dir->path / "main").string();
    text::write_file_atomic(source, candidate);
    const auto argv = expand_command(template_, {{"source", source}, {"binary", binary}, {"dir", dir->path.string()}});
    const auto r = run_process(argv, "", timeout_, dir->path.string());
    if (r.timed_out) throw ToolchainError("compiler timed out");
    CompileResult out;
    out.status = r.exit_code == 0 ? CompileStatus::Success : CompileStatus::Fail;
    out.diagnostics = r.stderr_text.empty() ? r.stdout_text : r.stderr_text;
    out.artifact = binary;
    out.keepalive = dir;
    return out;
}

CommandRunner::CommandRunner(std::string command_template) : template_(std::move(command_template)) {
    if (text::trim(template_).empty()) throw ConfigError("runner command is empty");
}

RunResult CommandRunner::run(const CompileResult& compiled, const std::string& input, std::chrono::milliseconds timeout) {
    const auto binary = compiled.artifact;
    const auto argv = expand_command(template_, {{"binary", binary}, {"dir", fs::path(binary).parent_path().string()}});
    const auto r = run_process(argv, input, timeout);
    return RunResult{r.exit_code, r.stdout_text, r.timed_out};
}

MockCompiler MockCompiler::parse(std::string_view content) {
    MockCompiler m;
    for (const auto& j : jsonl::parse(content, "mock compiler script")) {
        if (!j.is_object() || !j.contains("status") || !j["status"].is_string())
            throw FormatError("mock compiler script: record needs a status");
        const auto status = j["status"].get<std::string>();
        if (status != "success" && status != "fail") throw FormatError("mock compiler script: bad status " + status);
        m.add(key_of(j, "mock compiler script"),
              Rule{status == "success" ? CompileStatus::Success : CompileStatus::Fail, j.value("diagnostics", "")});
    }
    return m;
}

MockCompiler MockCompiler::load(const std::string& path) { return parse(text::read_file(path)); }

void MockCompiler::add(std::string digest_or_wildcard, Rule rule) { rules_[std::move(digest_or_wildcard)] = std::move(rule); }

CompileResult MockCompiler::compile(const std::string& candidate) {
    const auto digest = candidate_digest(candidate);
    auto it = rules_.find(digest);
    if (it == rules_.end()) it = rules_.find("*");
    if (it == rules_.end()) throw ToolchainError("mock compiler has no entry for candidate " + digest);
    return CompileResult{it->second.status, it->second.diagnostics, digest, nullptr};
}

MockRunner MockRunner::parse(std::string_view content) {
    MockRunner m;
    for (const auto& j : jsonl::parse(content, "mock runner script")) {
        if (!j.is_object() || !j.contains("input") || !j["input"].is_string())
            throw FormatError("mock runner script: record needs an input");
        RunResult r{j.value("exit_code", 0), j.value("output", ""), j.value("timeout", false)};
        m.add(key_of(j, "mock runner script"), j["input"].get<std::string>(), std::move(r));
    }
    return m;
}

MockRunner MockRunner::load(const std::string& path) { return parse(text::read_file(path)); }

void MockRunner::add(std::string digest_or_wildcard, std::string input_or_wildcard, RunResult result) {
    rules_[{std::move(digest_or_wildcard), std::move(input_or_wildcard)}] = std::move(result);
}

RunResult MockRunner::run(const CompileResult& compiled, const std::string& input, std::chrono::milliseconds) {
    for (const auto& key : {std::pair{compiled.artifact, input}, std::pair{compiled.artifact, std::string("*")},
                            std::pair{std::string("*"), input}, std::pair{std::string("*"), std::string("*")}}) {
        if (const auto it = rules_.find(key); it != rules_.end()) return it->second;
    }
    throw ToolchainError("mock runner has no entry for candidate " + compiled.artifact);
}

} // namespace cjtrans::engine
