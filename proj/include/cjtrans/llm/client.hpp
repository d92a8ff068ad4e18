#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace cjtrans::llm {

struct DecodingConfig {
    double temperature = 0.0;
    double top_p = 1.0;
    int max_tokens = 2048;

    /// Throws ConfigError when out of range.
    void validate() const;
};

/// Stable key used to look prompts up in transcripts.
std::string prompt_digest(std::string_view prompt);

/// A completion backend. Implementations must be safe for concurrent calls.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;

    /// Throws PreconditionError for an empty prompt and AdapterError when the
    /// backend cannot produce a reply.
    virtual std::string complete(std::string_view prompt, const DecodingConfig& cfg) = 0;
};

struct TranscriptEntry {
    std::string prompt;
    std::string reply;
};

/// Recorded prompt/reply pairs keyed by prompt digest. Persisted as JSONL
/// records `{digest, prompt, reply}` sorted by digest.
class Transcript {
public:
    static Transcript load(const std::string& path);
    static Transcript parse(std::string_view content);
    std::string serialize() const;
    void save(const std::string& path) const;

    /// Replaces any earlier reply for the same prompt.
    void put(std::string prompt, std::string reply);
    std::optional<std::string> find(std::string_view digest) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, TranscriptEntry>& entries() const { return entries_; }

private:
    std::map<std::string, TranscriptEntry> entries_;
};

/// Deterministic replay backend.
class TranscriptClient final : public CompletionClient {
public:
    explicit TranscriptClient(Transcript transcript) : transcript_(std::move(transcript)) {}

    /// A miss raises AdapterError carrying the prompt digest.
    std::string complete(std::string_view prompt, const DecodingConfig& cfg) override;

private:
    Transcript transcript_;
};

/// Forwards to another client and records every exchange. With a path, the
/// transcript file is rewritten after each reply.
class RecordingClient final : public CompletionClient {
public:
    RecordingClient(std::shared_ptr<CompletionClient> inner, std::string path = {});

    std::string complete(std::string_view prompt, const DecodingConfig& cfg) override;
    Transcript transcript() const;

private:
    std::shared_ptr<CompletionClient> inner_;
    std::string path_;
    mutable std::mutex mutex_;
    Transcript transcript_;
};

/// Content of the first fenced code block; the trimmed reply when there is none.
std::string extract_code_block(std::string_view reply);

} // namespace cjtrans::llm
