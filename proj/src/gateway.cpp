#include "crevtax/gateway.hpp"

#include <ctime>
#include <sstream>

#include <fmt/format.h>

#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "crevtax/text.hpp"

namespace crevtax {

nlohmann::ordered_json ModelConfig::decoding_json() const {
    nlohmann::ordered_json j;
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    j["stop"] = stop_sequences;
    return j;
}

std::string request_hash(const ModelConfig& config, std::string_view system_text, std::string_view user_text) {
    nlohmann::ordered_json key = nlohmann::ordered_json::array();
    key.push_back(config.model_id);
    key.push_back(system_text);
    key.push_back(user_text);
    key.push_back(config.decoding_json());
    return sha256_hex(key.dump());
}

nlohmann::ordered_json CompletionRecord::to_json() const {
    nlohmann::ordered_json j;
    j["request_hash"] = request_hash;
    j["model_id"] = model_id;
    j["raw_response"] = raw_response;
    j["latency_ms"] = latency_ms;
    if (token_usage)
        j["token_usage"] = {{"prompt_tokens", token_usage->prompt_tokens},
                            {"completion_tokens", token_usage->completion_tokens}};
    else
        j["token_usage"] = nullptr;
    j["timestamp"] = timestamp;
    return j;
}

CompletionRecord CompletionRecord::from_json(const nlohmann::json& j) {
    CompletionRecord r;
    r.request_hash = j.at("request_hash").get<std::string>();
    r.model_id = j.value("model_id", std::string{});
    r.raw_response = j.at("raw_response").get<std::string>();
    r.latency_ms = j.value("latency_ms", 0.0);
    if (const auto it = j.find("token_usage"); it != j.end() && it->is_object())
        r.token_usage = TokenUsage{it->value("prompt_tokens", std::uint64_t{0}), it->value("completion_tokens", std::uint64_t{0})};
    r.timestamp = j.value("timestamp", std::string{});
    return r;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// --- ResponseCache ---------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
    if (file_.empty()) return;
    if (std::ifstream in(file_); in) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (text::trim(line).empty()) continue;
            try {
                auto rec = CompletionRecord::from_json(nlohmann::json::parse(line));
                records_.try_emplace(rec.request_hash, std::move(rec));
            } catch (const std::exception& e) {
                text::warn(fmt::format("{}:{}: skipping unreadable cache record ({})", file_.string(), line_no, e.what()));
            }
        }
    }
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    out_.open(file_, std::ios::app);
    if (!out_) throw GatewayError(GatewayError::Kind::Transport, "cannot open cache file " + file_.string());
    stats_.entries = records_.size();
}

std::optional<CompletionRecord> ResponseCache::lookup(const std::string& hash) {
    std::lock_guard lock(mutex_);
    const auto it = records_.find(hash);
    if (it == records_.end()) return std::nullopt;
    ++stats_.hits;
    return it->second;
}

void ResponseCache::store(const CompletionRecord& record) {
    std::lock_guard lock(mutex_);
    if (!records_.try_emplace(record.request_hash, record).second) return;
    stats_.entries = records_.size();
    if (out_.is_open()) {
        out_ << record.to_json().dump() << '\n';
        out_.flush();
    }
}

void ResponseCache::record_miss(double latency_ms) {
    std::lock_guard lock(mutex_);
    ++stats_.misses;
    stats_.total_latency_ms += latency_ms;
}

CacheStats ResponseCache::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

// --- Mock ------------------------------------------------------------------

MockScript MockScript::from_json(const nlohmann::json& j) {
    MockScript s;
    if (const auto it = j.find("responses"); it != j.end()) {
        for (const auto& [key, value] : it->items()) s.responses.emplace(key, value.get<std::string>());
    }
    if (const auto it = j.find("default"); it != j.end() && it->is_string()) s.default_response = it->get<std::string>();
    return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GatewayError(GatewayError::Kind::MockScriptMiss, "cannot open mock script " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(GatewayError::Kind::MockScriptMiss, path.string() + ": " + e.what());
    }
}

MockSource::MockSource(MockScript script) : script_(std::move(script)) {}
MockSource::MockSource(Responder responder) : responder_(std::move(responder)) {}

FetchResult MockSource::fetch(const ChatRequest& request, const std::string& hash) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    if (responder_) {
        if (auto r = responder_(request)) return {std::move(*r), std::nullopt};
        throw GatewayError(GatewayError::Kind::MockScriptMiss, "mock responder declined request for " + request.tag.comment_id);
    }
    const auto& map = script_.responses;
    if (!request.tag.comment_id.empty()) {
        if (auto it = map.find(fmt::format("{}#{}", request.tag.comment_id, request.tag.step)); it != map.end())
            return {it->second, std::nullopt};
        if (auto it = map.find(request.tag.comment_id); it != map.end()) return {it->second, std::nullopt};
    }
    if (auto it = map.find(hash); it != map.end()) return {it->second, std::nullopt};
    if (script_.default_response) return {*script_.default_response, std::nullopt};
    throw GatewayError(GatewayError::Kind::MockScriptMiss,
                       fmt::format("mock script has no response for comment '{}' step {} (hash {})", request.tag.comment_id,
                                   request.tag.step, hash));
}

// --- Gateway ---------------------------------------------------------------

std::string_view to_string(BackendKind kind) noexcept {
    switch (kind) {
        case BackendKind::RemoteHttp: return "remote";
        case BackendKind::Mock: return "mock";
        case BackendKind::Replay: return "replay";
    }
    return "unknown";
}

Gateway::Gateway(BackendKind kind, ModelConfig config, std::shared_ptr<CompletionSource> source,
                 std::shared_ptr<ResponseCache> cache)
    : kind_(kind), config_(std::move(config)), source_(std::move(source)), cache_(std::move(cache)) {
    if (kind_ == BackendKind::Replay && !cache_) throw GatewayError(GatewayError::Kind::CacheMiss, "replay backend needs a cache");
    if (kind_ != BackendKind::Replay && !source_) throw Error("gateway backend needs a completion source");
}

ModelConfig Gateway::mock_config() {
    ModelConfig c;
    c.endpoint_url = "mock://";
    c.model_id = "mock";
    return c;
}

Gateway Gateway::mock(std::shared_ptr<MockSource> source, ModelConfig config, std::shared_ptr<ResponseCache> cache) {
    return Gateway(BackendKind::Mock, std::move(config), std::move(source), std::move(cache));
}

Gateway Gateway::replay(std::shared_ptr<ResponseCache> cache, ModelConfig config) {
    return Gateway(BackendKind::Replay, std::move(config), nullptr, std::move(cache));
}

Gateway Gateway::remote(ModelConfig config, std::shared_ptr<ResponseCache> cache, RetryPolicy retry) {
    retry.max_retries = config.max_retries;
    auto source = HttpSource::from_environment(config, std::move(retry));
    return Gateway(BackendKind::RemoteHttp, std::move(config), std::move(source), std::move(cache));
}

std::string Gateway::complete(const ChatRequest& request) {
    requests_.fetch_add(1, std::memory_order_relaxed);
    const auto hash = request_hash(config_, request.system_text, request.user_text);

    if (cache_) {
        if (auto hit = cache_->lookup(hash)) return std::move(hit->raw_response);
    }
    if (kind_ == BackendKind::Replay)
        throw GatewayError(GatewayError::Kind::CacheMiss, fmt::format("CacheMiss: no cached response for request {}", hash));

    const auto start = std::chrono::steady_clock::now();
    auto result = source_->fetch(request, hash);
    const double latency = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (cache_) {
        cache_->record_miss(latency);
        cache_->store(CompletionRecord{hash, config_.model_id, result.text, latency, result.usage, utc_timestamp()});
    }
    return std::move(result.text);
}

CacheStats Gateway::cache_stats() const { return cache_ ? cache_->stats() : CacheStats{}; }

}  // namespace crevtax
