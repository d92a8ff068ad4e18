#include "cjtrans/llm/client.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/text.hpp"

#include <cmath>

namespace cjtrans::llm {

void DecodingConfig::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw ConfigError("decoding: temperature must be a non-negative number");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("decoding: top_p must lie in (0, 1]");
    if (max_tokens <= 0) throw ConfigError("decoding: max_tokens must be positive");
}

std::string prompt_digest(std::string_view prompt) {
    return text::sha256_hex(prompt);
}

Transcript Transcript::parse(std::string_view content) {
    Transcript t;
    for (const auto& rec : jsonl::parse(content, "transcript")) {
        if (!rec.contains("digest") || !rec.contains("reply")) {
            throw FormatError("transcript record needs digest and reply");
        }
        TranscriptEntry e;
        e.reply = rec.at("reply").get<std::string>();
        auto digest = rec.at("digest").get<std::string>();
        if (rec.contains("prompt")) {
            e.prompt = rec.at("prompt").get<std::string>();
            if (prompt_digest(e.prompt) != digest) {
                throw FormatError("transcript digest does not match its prompt: " + digest);
            }
        }
        t.entries_[std::move(digest)] = std::move(e);
    }
    return t;
}

Transcript Transcript::load(const std::string& path) {
    return parse(text::read_file(path));
}

std::string Transcript::serialize() const {
    std::vector<jsonl::Json> records;
    records.reserve(entries_.size());
    for (const auto& [digest, e] : entries_) {
        records.push_back({{"digest", digest}, {"prompt", e.prompt}, {"reply", e.reply}});
    }
    return jsonl::dump(records);
}

void Transcript::save(const std::string& path) const {
    text::write_file_atomic(path, serialize());
}

void Transcript::put(std::string prompt, std::string reply) {
    auto digest = prompt_digest(prompt);
    entries_[std::move(digest)] = TranscriptEntry{std::move(prompt), std::move(reply)};
}

std::optional<std::string> Transcript::find(std::string_view digest) const {
    const auto it = entries_.find(std::string(digest));
    if (it == entries_.end()) return std::nullopt;
    return it->second.reply;
}

std::string TranscriptClient::complete(std::string_view prompt, const DecodingConfig&) {
    if (prompt.empty()) throw PreconditionError("prompt must not be empty");
    const auto digest = prompt_digest(prompt);
    auto reply = transcript_.find(digest);
    if (!reply) throw AdapterError("transcript miss for prompt digest " + digest);
    return *std::move(reply);
}

RecordingClient::RecordingClient(std::shared_ptr<CompletionClient> inner, std::string path)
    : inner_(std::move(inner)), path_(std::move(path)) {}

std::string RecordingClient::complete(std::string_view prompt, const DecodingConfig& cfg) {
    auto reply = inner_->complete(prompt, cfg);
    std::lock_guard lock(mutex_);
    transcript_.put(std::string(prompt), reply);
    if (!path_.empty()) transcript_.save(path_);
    return reply;
}

Transcript RecordingClient::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

std::string extract_code_block(std::string_view reply) {
    constexpr std::string_view fence = "```";
    const auto open = reply.find(fence);
    if (open == std::string_view::npos) return std::string(text::trim(reply));
    // The info string (language tag) runs to the end of the opening line.
    auto body_start = reply.find('\n', open + fence.size());
    if (body_start == std::string_view::npos) return std::string(text::trim(reply.substr(open + fence.size())));
    ++body_start;
    const auto close = reply.find(fence, body_start);
    auto body = reply.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.remove_suffix(1);
    return std::string(body);
}

} // namespace cjtrans::llm
