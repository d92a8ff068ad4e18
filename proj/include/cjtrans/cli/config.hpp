#pragma once

#include "cjtrans/ast/summary.hpp"
#include "cjtrans/engine/types.hpp"
#include "cjtrans/llm/client.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace cjtrans::cli {

struct PathsConfig {
    std::string chapters;
    std::string snippets;
    std::string parallel;
    std::string datasets = "datasets";
    std::string repository;
    std::string benchmark;
    std::string references;
    std::string reports = "reports";
    std::string allowlist;
    std::string vocab;
};

struct LlmConfig {
    std::string endpoint;
    std::string model;
    std::string api_key;
    /// Replay file; when set no endpoint is contacted.
    std::string transcript;
    /// When set, every exchange is appended to this transcript file.
    std::string record_transcript;
    llm::DecodingConfig decoding;
    std::size_t max_concurrency = 4;
    int max_attempts = 3;
};

struct ToolchainConfig {
    std::string compiler;
    std::string runner = "{binary}";
    std::string mock_compiler;
    std::string mock_runner;
};

struct PipelineConfig {
    PathsConfig paths;
    LlmConfig llm;
    ToolchainConfig toolchain;
    engine::RepairConfig repair;
    ast::RetainedSet retained = ast::default_retained_set();
    std::size_t jobs = 1;
    bool redact_traces = false;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
/// Reads the process environment.
EnvLookup process_env();

/// Parses a JSON configuration. Unknown keys and mistyped values raise
/// ConfigError. Relative paths are resolved against `base_dir`. The
/// variables CJTRANS_LLM_ENDPOINT, CJTRANS_LLM_API_KEY and CJTRANS_LLM_MODEL
/// override the corresponding file values.
PipelineConfig parse_config(std::string_view json, const std::string& base_dir, const EnvLookup& env);
/// Loads from a file; an empty path gives defaults (plus environment).
PipelineConfig load_config(const std::string& path, const EnvLookup& env = process_env());

/// Replay, remote or recording client as configured. Throws ConfigError
/// when neither a transcript nor an endpoint is set.
std::shared_ptr<llm::CompletionClient> make_client(const PipelineConfig& cfg);

} // namespace cjtrans::cli
