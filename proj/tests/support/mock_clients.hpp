#pragma once

#include "cjtrans/error.hpp"
#include "cjtrans/llm/client.hpp"

#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace cjtrans::testing {

/// Replies from a fixed queue, recording every prompt.
class ScriptedClient final : public llm::CompletionClient {
public:
    explicit ScriptedClient(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}

    std::string complete(std::string_view prompt, const llm::DecodingConfig&) override {
        std::lock_guard lock(mutex_);
        prompts.emplace_back(prompt);
        if (replies_.empty()) throw AdapterError("scripted client exhausted");
        auto r = std::move(replies_.front());
        replies_.pop_front();
        return r;
    }

    std::size_t remaining() const { return replies_.size(); }
    std::vector<std::string> prompts;

private:
    std::mutex mutex_;
    std::deque<std::string> replies_;
};

/// Computes the reply from the prompt.
class FunctionClient final : public llm::CompletionClient {
public:
    explicit FunctionClient(std::function<std::string(std::string_view)> fn) : fn_(std::move(fn)) {}
    std::string complete(std::string_view prompt, const llm::DecodingConfig&) override { return fn_(prompt); }

private:
    std::function<std::string(std::string_view)> fn_;
};

} // namespace cjtrans::testing
