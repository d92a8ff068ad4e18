#include "doctest.h"
#include "support/test_support.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/llm/client.hpp"
#include "cjtrans/llm/prompt_template.hpp"
#include "cjtrans/llm/remote.hpp"
#include "cjtrans/llm/templates.hpp"
#include "cjtrans/text.hpp"

#include "httplib.h"

#include <nlohmann/json.hpp>

#include <atomic>
#include <deque>
#include <set>
#include <thread>

using namespace cjtrans;
using namespace cjtrans::llm;

namespace {

// Replays a fixed sequence of outcomes; nullopt means a transport failure.
class FaultyTransport final : public HttpTransport {
public:
    explicit FaultyTransport(std::deque<std::optional<HttpResponse>> script) : script_(std::move(script)) {}

    HttpResponse post_json(const std::string& body, const Headers&) override {
        ++calls;
        last_body = body;
        if (script_.empty()) throw TransportError("script exhausted");
        auto next = script_.front();
        script_.pop_front();
        if (!next) throw TransportError("connection refused");
        return *next;
    }

    int calls = 0;
    std::string last_body;

private:
    std::deque<std::optional<HttpResponse>> script_;
};

std::string ok_body(const std::string& reply) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}}.dump();
}

RemoteConfig fast_config() {
    RemoteConfig cfg;
    cfg.endpoint = "http://localhost/v1/chat/completions";
    cfg.model = "test-model";
    cfg.initial_backoff = std::chrono::milliseconds(0);
    return cfg;
}

} // namespace

TEST_CASE("PromptTemplate.render") {
    const PromptTemplate t("t", "T: {code}");
    CHECK(t.render({{"code", "x"}}) == "T: x");
    CHECK(t.required_slots() == std::set<std::string, std::less<>>{"code"});

    SUBCASE("missing slot names the slot") {
        try {
            (void)t.render({});
            FAIL("expected an error");
        } catch (const PreconditionError& e) {
            CHECK(text::contains(e.what(), "code"));
        }
    }
    SUBCASE("unknown slot is rejected") {
        CHECK_THROWS_AS(t.render({{"code", "x"}, {"extra", "y"}}), PreconditionError);
    }
    SUBCASE("slot values are inserted literally") {
        const PromptTemplate two("two", "A={a} B={b}");
        CHECK(two.render({{"a", "{b}"}, {"b", "1"}}) == "A={b} B=1");
    }
    SUBCASE("non-identifier braces are literal text") {
        const PromptTemplate code("code", "func f() { return {x} }");
        CHECK(code.required_slots().size() == 1);
        CHECK(code.render({{"x", "1"}}) == "func f() { return 1 }");
    }
    SUBCASE("construction errors") {
        CHECK_THROWS_AS(PromptTemplate("dup", "{a} and {a}"), FormatError);
        CHECK_THROWS_AS(PromptTemplate("none", "no slots"), FormatError);
    }
}

TEST_CASE("render is injective for delimiter-separated placeholders") {
    const PromptTemplate t("inj", "[a]{a}\n[b]{b}\n[c]{c}");
    std::mt19937_64 rng(99);
    const std::string alphabet = "xyz01 {}";
    std::set<std::string> prompts;
    std::set<std::tuple<std::string, std::string, std::string>> inputs;
    for (int i = 0; i < 2000; ++i) {
        std::array<std::string, 3> v;
        for (auto& s : v) {
            const auto len = rng() % 4;
            for (std::size_t j = 0; j < len; ++j) s += alphabet[rng() % alphabet.size()];
        }
        if (!inputs.emplace(v[0], v[1], v[2]).second) continue;
        CHECK(prompts.insert(t.render({{"a", v[0]}, {"b", v[1]}, {"c", v[2]}})).second);
    }
}

TEST_CASE("shipped templates declare the documented slots") {
    using S = std::set<std::string, std::less<>>;
    CHECK(templates::doc_reconstruction().required_slots() == S{"chapter", "title"});
    CHECK(templates::semantic_annotation().required_slots() == S{"code"});
    CHECK(templates::compile_repair_analysis().required_slots() == S{"cangjie_code", "error_message", "java_source"});
    CHECK(templates::compile_repair_code().required_slots() ==
          S{"cangjie_code", "error_message", "guidance", "java_source"});
    CHECK(templates::test_repair_analysis().required_slots() == S{"cangjie_code", "java_source", "test_failures"});
    CHECK(templates::test_repair_code().required_slots() ==
          S{"cangjie_code", "guidance", "java_source", "test_failures"});
    CHECK(templates::rag_repair().required_slots() == S{"cangjie_code", "error_message", "similar_cases"});
    CHECK(text::contains(templates::semantic_annotation().body(), "assistant for code semantic interpretation"));
}

TEST_CASE("DecodingConfig defaults and validation") {
    const DecodingConfig cfg;
    CHECK(cfg.temperature == 0.0);
    CHECK(cfg.top_p == 1.0);
    CHECK_NOTHROW(cfg.validate());
    CHECK_THROWS_AS((DecodingConfig{-0.1, 1.0, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((DecodingConfig{0.0, 0.0, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((DecodingConfig{0.0, 1.5, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((DecodingConfig{0.0, 1.0, 0}.validate()), ConfigError);
}

TEST_CASE("transcript replay") {
    Transcript t;
    t.put("p", "ok");
    TranscriptClient client(t);
    CHECK(client.complete("p", {}) == "ok");

    try {
        (void)client.complete("unknown prompt", {});
        FAIL("expected a transcript miss");
    } catch (const AdapterError& e) {
        CHECK(text::contains(e.what(), prompt_digest("unknown prompt")));
    }
    CHECK_THROWS_AS(client.complete("", {}), PreconditionError);
}

TEST_CASE("transcript persistence") {
    cjtrans::testing::TempDir dir;
    Transcript t;
    t.put("second", "2");
    t.put("first", "1");
    t.save(dir.str("t.jsonl"));
    const auto loaded = Transcript::load(dir.str("t.jsonl"));
    CHECK(loaded.serialize() == t.serialize());
    CHECK(loaded.find(prompt_digest("first")) == std::optional<std::string>("1"));

    CHECK_THROWS_AS(Transcript::parse(R"({"digest":"abc","prompt":"p","reply":"r"})"), FormatError);
    CHECK_THROWS_AS(Transcript::parse(R"({"prompt":"p"})"), FormatError);
    // Hand-written fixtures may omit the prompt.
    const auto bare = Transcript::parse(R"({"digest":")" + prompt_digest("q") + R"(","reply":"r"})");
    CHECK(TranscriptClient(bare).complete("q", {}) == "r");
}

TEST_CASE("recording client captures exchanges for replay") {
    cjtrans::testing::TempDir dir;
    Transcript source;
    source.put("a", "reply-a");
    source.put("b", "reply-b");
    auto inner = std::make_shared<TranscriptClient>(source);
    RecordingClient rec(inner, dir.str("rec.jsonl"));
    CHECK(rec.complete("a", {}) == "reply-a");
    CHECK(rec.complete("b", {}) == "reply-b");
    CHECK(rec.transcript().size() == 2);
    TranscriptClient replay(Transcript::load(dir.str("rec.jsonl")));
    CHECK(replay.complete("b", {}) == "reply-b");
}

TEST_CASE("remote client retry policy") {
    SUBCASE("two failures then success within a budget of three") {
        auto transport = std::make_unique<FaultyTransport>(std::deque<std::optional<HttpResponse>>{
            std::nullopt, HttpResponse{503, "busy"}, HttpResponse{200, ok_body("done")}});
        auto* raw = transport.get();
        RemoteClient client(fast_config(), std::move(transport));
        CHECK(client.complete("hello", {}) == "done");
        CHECK(raw->calls == 3);
        const auto req = nlohmann::json::parse(raw->last_body);
        CHECK(req["model"] == "test-model");
        CHECK(req["temperature"] == 0.0);
        CHECK(req["top_p"] == 1.0);
        CHECK(req["messages"][0]["content"] == "hello");
    }
    SUBCASE("three failures exhaust the budget") {
        auto transport = std::make_unique<FaultyTransport>(std::deque<std::optional<HttpResponse>>{
            std::nullopt, std::nullopt, HttpResponse{500, "x"}, HttpResponse{200, ok_body("late")}});
        auto* raw = transport.get();
        RemoteClient client(fast_config(), std::move(transport));
        CHECK_THROWS_AS(client.complete("hello", {}), AdapterError);
        CHECK(raw->calls == 3);
    }
    SUBCASE("client errors are not retried") {
        auto transport = std::make_unique<FaultyTransport>(
            std::deque<std::optional<HttpResponse>>{HttpResponse{401, "denied"}, HttpResponse{200, ok_body("x")}});
        auto* raw = transport.get();
        RemoteClient client(fast_config(), std::move(transport));
        CHECK_THROWS_AS(client.complete("hello", {}), AdapterError);
        CHECK(raw->calls == 1);
    }
    SUBCASE("malformed success body") {
        auto transport = std::make_unique<FaultyTransport>(
            std::deque<std::optional<HttpResponse>>{HttpResponse{200, R"({"choices":[]})"}});
        RemoteClient client(fast_config(), std::move(transport));
        CHECK_THROWS_AS(client.complete("hello", {}), AdapterError);
    }
}

TEST_CASE("remote client bounds concurrent requests") {
    class SlowTransport final : public HttpTransport {
    public:
        HttpResponse post_json(const std::string&, const Headers&) override {
            const int now = ++in_flight;
            int seen = peak.load();
            while (now > seen && !peak.compare_exchange_weak(seen, now)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            --in_flight;
            return {200, ok_body("ok")};
        }
        std::atomic<int> in_flight{0};
        std::atomic<int> peak{0};
    };
    auto transport = std::make_unique<SlowTransport>();
    auto* raw = transport.get();
    auto cfg = fast_config();
    cfg.max_concurrency = 2;
    RemoteClient client(cfg, std::move(transport));
    std::vector<std::jthread> threads;
    for (int i = 0; i < 8; ++i) threads.emplace_back([&] { (void)client.complete("p", {}); });
    threads.clear();
    CHECK(raw->peak.load() <= 2);
    CHECK(raw->peak.load() >= 1);
}

TEST_CASE("remote client over a loopback HTTP server") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (++hits <= 2) {
            res.status = 503;
            return;
        }
        auth = req.get_header_value("Authorization");
        const auto body = nlohmann::json::parse(req.body);
        res.set_content(ok_body("echo:" + body["messages"][0]["content"].get<std::string>()), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::jthread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto cfg = fast_config();
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.api_key = "secret";
    RemoteClient client(cfg, std::make_unique<HttplibTransport>(cfg.endpoint, std::chrono::seconds(5)));
    CHECK(client.complete("ping", {}) == "echo:ping");
    CHECK(hits.load() == 3);
    CHECK(auth == "Bearer secret");
    server.stop();
}

TEST_CASE("extract_code_block") {
    CHECK(extract_code_block("```\nmain()\n```") == "main()");
    CHECK(extract_code_block("Here is the fix:\n```cangjie\nmain() {\n    println(1)\n}\n```\nDone.") ==
          "main() {\n    println(1)\n}");
    CHECK(extract_code_block("  just code  \n") == "just code");
    CHECK(extract_code_block("```a\nfirst\n```\n```b\nsecond\n```") == "first");
    CHECK(extract_code_block("```\nunterminated") == "unterminated");
    CHECK(extract_code_block("").empty());
}
