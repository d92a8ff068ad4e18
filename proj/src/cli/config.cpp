#include "cjtrans/cli/config.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/llm/remote.hpp"
#include "cjtrans/text.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

namespace cjtrans::cli {

namespace fs = std::filesystem;
using jsonl::Json;

EnvLookup process_env() {
    return [](const std::string& key) -> std::optional<std::string> {
        const char* v = std::getenv(key.c_str());
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
}

namespace {

class Reader {
public:
    Reader(const Json& j, std::string where, std::set<std::string> known) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
        for (const auto& [key, value] : j_.items())
            if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
    }

    template <typename T>
    void get(const char* key, T& out) const {
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const Json::exception&) {
            throw ConfigError(where_ + "." + key + " has the wrong type");
        }
    }

    void path(const char* key, std::string& out, const std::string& base) const {
        get(key, out);
        if (!out.empty() && fs::path(out).is_relative() && j_.contains(key)) out = (fs::path(base) / out).lexically_normal().string();
    }

    const Json& sub(const char* key) const {
        static const Json empty = Json::object();
        return j_.contains(key) ? j_.at(key) : empty;
    }

private:
    const Json& j_;
    std::string where_;
};

std::string resolve_default(const std::string& p, const std::string& base) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base) / p).lexically_normal().string();
}

} // namespace

PipelineConfig parse_config(std::string_view json, const std::string& base_dir, const EnvLookup& env) {
    Json root;
    try {
        root = json.empty() ? Json::object() : Json::parse(json);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    cfg.paths.datasets = resolve_default(cfg.paths.datasets, base_dir);
    cfg.paths.reports = resolve_default(cfg.paths.reports, base_dir);

    const Reader top(root, "config", {"paths", "llm", "toolchain", "repair", "retained_node_kinds", "jobs", "redact_traces"});
    top.get("jobs", cfg.jobs);
    top.get("redact_traces", cfg.redact_traces);
    if (root.contains("retained_node_kinds")) {
        std::vector<std::string> kinds;
        top.get("retained_node_kinds", kinds);
        if (kinds.empty()) throw ConfigError("retained_node_kinds must not be empty");
        cfg.retained = ast::RetainedSet(kinds.begin(), kinds.end());
    }

    const Reader paths(top.sub("paths"), "paths",
                       {"chapters", "snippets", "parallel", "datasets", "repository", "benchmark", "references",
                        "reports", "allowlist", "vocab"});
    auto& p = cfg.paths;
    for (auto [key, field] : std::initializer_list<std::pair<const char*, std::string*>>{
             {"chapters", &p.chapters}, {"snippets", &p.snippets}, {"parallel", &p.parallel},
             {"datasets", &p.datasets}, {"repository", &p.repository}, {"benchmark", &p.benchmark},
             {"references", &p.references}, {"reports", &p.reports}, {"allowlist", &p.allowlist}, {"vocab", &p.vocab}})
        paths.path(key, *field, base_dir);

    const Reader llm(top.sub("llm"), "llm",
                     {"endpoint", "model", "api_key", "transcript", "record_transcript", "temperature", "top_p",
                      "max_tokens", "max_concurrency", "max_attempts"});
    llm.get("endpoint", cfg.llm.endpoint);
    llm.get("model", cfg.llm.model);
    llm.get("api_key", cfg.llm.api_key);
    llm.path("transcript", cfg.llm.transcript, base_dir);
    llm.path("record_transcript", cfg.llm.record_transcript, base_dir);
    llm.get("temperature", cfg.llm.decoding.temperature);
    llm.get("top_p", cfg.llm.decoding.top_p);
    llm.get("max_tokens", cfg.llm.decoding.max_tokens);
    llm.get("max_concurrency", cfg.llm.max_concurrency);
    llm.get("max_attempts", cfg.llm.max_attempts);

    const Reader tc(top.sub("toolchain"), "toolchain", {"compiler", "runner", "mock_compiler", "mock_runner"});
    tc.get("compiler", cfg.toolchain.compiler);
    tc.get("runner", cfg.toolchain.runner);
    tc.path("mock_compiler", cfg.toolchain.mock_compiler, base_dir);
    tc.path("mock_runner", cfg.toolchain.mock_runner, base_dir);

    const Reader rep(top.sub("repair"), "repair", {"threshold", "max_iterations", "top_k", "test_timeout_ms", "weights"});
    rep.get("threshold", cfg.repair.threshold);
    rep.get("max_iterations", cfg.repair.max_iterations);
    rep.get("top_k", cfg.repair.top_k);
    long long timeout_ms = cfg.repair.test_timeout.count();
    rep.get("test_timeout_ms", timeout_ms);
    cfg.repair.test_timeout = std::chrono::milliseconds(timeout_ms);
    if (top.sub("repair").contains("weights")) {
        std::vector<double> w;
        rep.get("weights", w);
        if (w.size() != repo::kDimensions) throw ConfigError("repair.weights needs exactly 6 values");
        std::array<double, repo::kDimensions> raw{};
        std::copy(w.begin(), w.end(), raw.begin());
        try {
            cfg.repair.weights = repo::SimilarityWeights(raw);
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("repair.weights: ") + e.what());
        }
    }

    if (const auto v = env("CJTRANS_LLM_ENDPOINT")) cfg.llm.endpoint = *v;
    if (const auto v = env("CJTRANS_LLM_API_KEY")) cfg.llm.api_key = *v;
    if (const auto v = env("CJTRANS_LLM_MODEL")) cfg.llm.model = *v;

    cfg.repair.decoding = cfg.llm.decoding;
    if (cfg.jobs == 0) throw ConfigError("jobs must be positive");
    if (cfg.llm.max_concurrency == 0) throw ConfigError("llm.max_concurrency must be positive");
    if (cfg.llm.max_attempts <= 0) throw ConfigError("llm.max_attempts must be positive");
    cfg.repair.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path, const EnvLookup& env) {
    if (path.empty()) return parse_config("", fs::current_path().string(), env);
    std::string content;
    try {
        content = text::read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(content, fs::absolute(path).parent_path().string(), env);
}

std::shared_ptr<llm::CompletionClient> make_client(const PipelineConfig& cfg) {
    std::shared_ptr<llm::CompletionClient> client;
    if (!cfg.llm.transcript.empty()) {
        try {
            client = std::make_shared<llm::TranscriptClient>(llm::Transcript::load(cfg.llm.transcript));
        } catch (const FormatError& e) {
            throw ConfigError(std::string("transcript: ") + e.what());
        }
    } else if (!cfg.llm.endpoint.empty()) {
        llm::RemoteConfig rc;
        rc.endpoint = cfg.llm.endpoint;
        rc.model = cfg.llm.model;
        rc.api_key = cfg.llm.api_key;
        rc.max_attempts = cfg.llm.max_attempts;
        rc.max_concurrency = static_cast<int>(cfg.llm.max_concurrency);
        client = std::make_shared<llm::RemoteClient>(rc, std::make_unique<llm::HttplibTransport>(rc.endpoint));
    } else {
        throw ConfigError("no model configured: set llm.transcript or llm.endpoint");
    }
    if (!cfg.llm.record_transcript.empty())
        client = std::make_shared<llm::RecordingClient>(client, cfg.llm.record_transcript);
    return client;
}

} // namespace cjtrans::cli
