#pragma once

#include "cjtrans/error.hpp"
#include "cjtrans/llm/client.hpp"

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

namespace cjtrans::llm {

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Connection-level failure (refused, reset, timed out).
class TransportError : public AdapterError {
public:
    using AdapterError::AdapterError;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// Throws TransportError when no HTTP response was received.
    virtual HttpResponse post_json(const std::string& body, const Headers& headers) = 0;
};

/// cpp-httplib transport for an `http://` or `https://` URL.
class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::string url, std::chrono::seconds timeout = std::chrono::seconds(120));
    HttpResponse post_json(const std::string& body, const Headers& headers) override;

private:
    std::string origin_;
    std::string path_;
    std::chrono::seconds timeout_;
};

struct RemoteConfig {
    std::string endpoint;  // full URL of the chat-completion route
    std::string model;
    std::string api_key;   // sent as a Bearer token when non-empty
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    int max_concurrency = 4;
};

/// Chat-completion endpoint client. Retries transport failures and 5xx
/// responses with exponential backoff; 4xx responses fail immediately.
class RemoteClient final : public CompletionClient {
public:
    RemoteClient(RemoteConfig cfg, std::unique_ptr<HttpTransport> transport);

    std::string complete(std::string_view prompt, const DecodingConfig& cfg) override;

    /// Request body sent for `prompt`.
    std::string request_body(std::string_view prompt, const DecodingConfig& cfg) const;
    /// Reply text of a successful response. Throws AdapterError when malformed.
    static std::string parse_reply(const std::string& body);

private:
    RemoteConfig cfg_;
    std::unique_ptr<HttpTransport> transport_;
    std::counting_semaphore<> budget_;
};

} // namespace cjtrans::llm
