#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace crevtax {

struct ModelConfig {
    std::string endpoint_url = "https://api.together.xyz/v1/chat/completions";
    std::string model_id = "meta-llama/Meta-Llama-3.1-405B-Instruct-Turbo";
    double temperature = 0.0;
    int max_tokens = 32;
    std::vector<std::string> stop_sequences{"$"};
    std::chrono::milliseconds request_timeout{60'000};
    int max_retries = 5;
    int max_in_flight = 4;
    std::string api_key_env = "CREVTAX_API_KEY";

    /// Everything that changes what the model would answer; feeds the request hash.
    [[nodiscard]] nlohmann::ordered_json decoding_json() const;
};

/// Digest of (model id, prompt texts, decoding parameters).
std::string request_hash(const ModelConfig& config, std::string_view system_text, std::string_view user_text);

/// Routing metadata for scripted backends; never part of the request hash.
struct RequestTag {
    std::string comment_id;
    int step = 1;  ///< 1 = flat or hierarchical group step, 2 = hierarchical category step
};

struct ChatRequest {
    std::string system_text;
    std::string user_text;
    RequestTag tag;
};

struct TokenUsage {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

struct CompletionRecord {
    std::string request_hash;
    std::string model_id;
    std::string raw_response;
    double latency_ms = 0.0;
    std::optional<TokenUsage> token_usage;
    std::string timestamp;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    static CompletionRecord from_json(const nlohmann::json& j);
};

struct FetchResult {
    std::string text;
    std::optional<TokenUsage> usage;
};

/// Something that can answer a chat request. Implementations must be thread-safe.
class CompletionSource {
public:
    virtual ~CompletionSource() = default;
    virtual FetchResult fetch(const ChatRequest& request, const std::string& hash) = 0;
};

struct CacheStats {
    std::uint64_t entries = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    double total_latency_ms = 0.0;  ///< summed over fetched (missed) requests

    bool operator==(const CacheStats&) const = default;
};

/// Request-hash keyed response store, optionally persisted as append-only JSON lines.
/// Writes are serialized; a torn trailing line from an interrupted run is skipped on load.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path file);

    std::optional<CompletionRecord> lookup(const std::string& hash);
    /// First record for a hash wins; later duplicates are ignored.
    void store(const CompletionRecord& record);
    void record_miss(double latency_ms);

    [[nodiscard]] CacheStats stats() const;
    [[nodiscard]] const std::filesystem::path& file() const noexcept { return file_; }

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CompletionRecord> records_;
    std::filesystem::path file_;
    std::ofstream out_;
    CacheStats stats_;
};

/// Scripted responses. Lookup order: "<comment_id>#<step>", "<comment_id>", request hash, default.
struct MockScript {
    std::map<std::string, std::string> responses;
    std::optional<std::string> default_response;

    static MockScript load(const std::filesystem::path& path);
    static MockScript from_json(const nlohmann::json& j);
};

class MockSource final : public CompletionSource {
public:
    using Responder = std::function<std::optional<std::string>(const ChatRequest&)>;

    explicit MockSource(MockScript script);
    explicit MockSource(Responder responder);

    FetchResult fetch(const ChatRequest& request, const std::string& hash) override;
    [[nodiscard]] std::uint64_t calls() const noexcept { return calls_.load(); }

private:
    MockScript script_;
    Responder responder_;
    std::atomic<std::uint64_t> calls_{0};
};

struct RetryPolicy {
    int max_retries = 5;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{20'000};
    double multiplier = 2.0;
    /// Injected so tests can observe delays without sleeping.
    std::function<void(std::chrono::milliseconds)> sleep;

    /// Exponential delay for a 0-based attempt with "equal jitter": half fixed, half uniform.
    [[nodiscard]] std::chrono::milliseconds delay_for(int attempt, double unit_random) const;
};

/// OpenAI-style chat-completion endpoint over HTTP(S) with bearer auth.
class HttpSource final : public CompletionSource {
public:
    HttpSource(ModelConfig config, std::string api_key, RetryPolicy retry = {});
    /// Reads the key from config.api_key_env; throws GatewayError(AuthMissing) if unset.
    static std::shared_ptr<HttpSource> from_environment(const ModelConfig& config, RetryPolicy retry = {});

    FetchResult fetch(const ChatRequest& request, const std::string& hash) override;
    [[nodiscard]] std::uint64_t network_calls() const noexcept { return network_calls_.load(); }

    /// Builds the JSON request body; exposed for tests.
    [[nodiscard]] nlohmann::json request_body(const ChatRequest& request) const;
    /// Extracts choices[0].message.content and usage; throws MalformedEndpointReply.
    static FetchResult parse_reply(std::string_view body);

private:
    class InFlight;

    ModelConfig config_;
    std::string api_key_;
    RetryPolicy retry_;
    std::string scheme_host_port_;
    std::string path_;
    std::shared_ptr<InFlight> in_flight_;
    std::atomic<std::uint64_t> network_calls_{0};
    std::mutex jitter_mutex_;
    std::uint64_t jitter_state_;
};

enum class BackendKind { RemoteHttp, Mock, Replay };

std::string_view to_string(BackendKind kind) noexcept;

/// Uniform completion entry point: cache first, then the source (none for Replay).
class Gateway {
public:
    Gateway(BackendKind kind, ModelConfig config, std::shared_ptr<CompletionSource> source,
            std::shared_ptr<ResponseCache> cache);

    static Gateway mock(std::shared_ptr<MockSource> source, ModelConfig config = mock_config(),
                        std::shared_ptr<ResponseCache> cache = nullptr);
    static Gateway replay(std::shared_ptr<ResponseCache> cache, ModelConfig config);
    static Gateway remote(ModelConfig config, std::shared_ptr<ResponseCache> cache, RetryPolicy retry = {});

    static ModelConfig mock_config();

    std::string complete(const ChatRequest& request);
    std::string complete(std::string system_text, std::string user_text) {
        return complete(ChatRequest{std::move(system_text), std::move(user_text), {}});
    }

    [[nodiscard]] CacheStats cache_stats() const;
    [[nodiscard]] std::uint64_t requests() const noexcept { return requests_.load(); }
    [[nodiscard]] const ModelConfig& config() const noexcept { return config_; }
    [[nodiscard]] BackendKind kind() const noexcept { return kind_; }

private:
    BackendKind kind_;
    ModelConfig config_;
    std::shared_ptr<CompletionSource> source_;
    std::shared_ptr<ResponseCache> cache_;
    std::atomic<std::uint64_t> requests_{0};
};

std::string utc_timestamp();

}  // namespace crevtax
