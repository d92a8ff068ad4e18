#include "httplib.h"

#include "cjtrans/llm/remote.hpp"

#include <nlohmann/json.hpp>

#include <thread>

namespace cjtrans::llm {

HttplibTransport::HttplibTransport(std::string url, std::chrono::seconds timeout) : timeout_(timeout) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
}

HttpResponse HttplibTransport::post_json(const std::string& body, const Headers& headers) {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers hs;
    for (const auto& [k, v] : headers) hs.emplace(k, v);
    auto res = client.Post(path_, hs, body, "application/json");
    if (!res) throw TransportError("POST " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
}

RemoteClient::RemoteClient(RemoteConfig cfg, std::unique_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), budget_(std::max(1, cfg_.max_concurrency)) {
    if (cfg_.max_attempts < 1) throw ConfigError("remote: max_attempts must be at least 1");
    if (!transport_) throw ConfigError("remote: transport is required");
}

std::string RemoteClient::request_body(std::string_view prompt, const DecodingConfig& cfg) const {
    nlohmann::ordered_json req = {
        {"model", cfg_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"temperature", cfg.temperature},
        {"top_p", cfg.top_p},
        {"max_tokens", cfg.max_tokens},
    };
    return req.dump();
}

std::string RemoteClient::parse_reply(const std::string& body) {
    try {
        const auto j = nlohmann::json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw AdapterError(std::string("malformed completion response: ") + e.what());
    }
}

std::string RemoteClient::complete(std::string_view prompt, const DecodingConfig& cfg) {
    if (prompt.empty()) throw PreconditionError("prompt must not be empty");
    const auto body = request_body(prompt, cfg);
    Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);

    budget_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{budget_};

    std::string last_error;
    auto backoff = cfg_.initial_backoff;
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
        try {
            const auto res = transport_->post_json(body, headers);
            if (res.status >= 200 && res.status < 300) return parse_reply(res.body);
            if (res.status < 500) {
                throw AdapterError("endpoint rejected request with HTTP " + std::to_string(res.status) + ": " +
                                   res.body.substr(0, 200));
            }
            last_error = "HTTP " + std::to_string(res.status);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < cfg_.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw AdapterError("endpoint unreachable after " + std::to_string(cfg_.max_attempts) +
                       " attempts: " + last_error);
}

} // namespace cjtrans::llm
