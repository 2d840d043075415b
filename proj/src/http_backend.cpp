#include <cstdlib>
#include <semaphore>
#include <thread>

#include <fmt/format.h>

#include "crevtax/errors.hpp"
#include "crevtax/gateway.hpp"
#include "httplib.h"

namespace crevtax {

class HttpSource::InFlight {
public:
    explicit InFlight(int limit) : sem_(std::max(1, limit)) {}
    void acquire() { sem_.acquire(); }
    void release() { sem_.release(); }

    class Permit {
    public:
        explicit Permit(InFlight& owner) : owner_(owner) { owner_.acquire(); }
        ~Permit() { owner_.release(); }
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;

    private:
        InFlight& owner_;
    };

private:
    std::counting_semaphore<1024> sem_;
};

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

bool is_transient(int status) { return status == 429 || (status >= 500 && status <= 599); }

}  // namespace

std::chrono::milliseconds RetryPolicy::delay_for(int attempt, double unit_random) const {
    double ms = static_cast<double>(base_delay.count());
    for (int i = 0; i < attempt; ++i) ms *= multiplier;
    ms = std::min(ms, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<long long>(ms * (0.5 + 0.5 * unit_random)));
}

HttpSource::HttpSource(ModelConfig config, std::string api_key, RetryPolicy retry)
    : config_(std::move(config)),
      api_key_(std::move(api_key)),
      retry_(std::move(retry)),
      in_flight_(std::make_shared<InFlight>(config_.max_in_flight)),
      jitter_state_(static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count())) {
    const auto& url = config_.endpoint_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw GatewayError(GatewayError::Kind::Transport, "endpoint url needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::shared_ptr<HttpSource> HttpSource::from_environment(const ModelConfig& config, RetryPolicy retry) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw GatewayError(GatewayError::Kind::AuthMissing,
                           fmt::format("AuthMissing: environment variable {} is not set", config.api_key_env));
    return std::make_shared<HttpSource>(config, key, std::move(retry));
}

nlohmann::json HttpSource::request_body(const ChatRequest& request) const {
    nlohmann::json body;
    body["model"] = config_.model_id;
    body["messages"] = nlohmann::json::array({
        {{"role", "system"}, {"content", request.system_text}},
        {{"role", "user"}, {"content", request.user_text}},
    });
    body["temperature"] = config_.temperature;
    body["max_tokens"] = config_.max_tokens;
    if (!config_.stop_sequences.empty()) body["stop"] = config_.stop_sequences;
    return body;
}

FetchResult HttpSource::parse_reply(std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw GatewayError(GatewayError::Kind::MalformedEndpointReply, std::string("MalformedEndpointReply: ") + e.what());
    }
    try {
        const auto& content = j.at("choices").at(0).at("message").at("content");
        FetchResult out;
        out.text = content.is_null() ? std::string{} : content.get<std::string>();
        if (const auto it = j.find("usage"); it != j.end() && it->is_object())
            out.usage = TokenUsage{it->value("prompt_tokens", std::uint64_t{0}), it->value("completion_tokens", std::uint64_t{0})};
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(GatewayError::Kind::MalformedEndpointReply,
                           std::string("MalformedEndpointReply: missing choices[0].message.content: ") + e.what());
    }
}

FetchResult HttpSource::fetch(const ChatRequest& request, const std::string& /*hash*/) {
    InFlight::Permit permit(*in_flight_);

    const std::string payload = request_body(request).dump();
    const auto timeout = config_.request_timeout;
    std::string last_error;

    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        client.set_bearer_token_auth(api_key_);

        network_calls_.fetch_add(1, std::memory_order_relaxed);
        auto res = client.Post(path_, payload, "application/json");

        std::chrono::milliseconds retry_after{0};
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
            return parse_reply(res->body);
        } else if (res->status == 401 || res->status == 403) {
            throw GatewayError(GatewayError::Kind::AuthMissing,
                               fmt::format("endpoint rejected credentials (HTTP {})", res->status));
        } else if (!is_transient(res->status)) {
            throw GatewayError(GatewayError::Kind::Transport,
                               fmt::format("HTTP {} from endpoint: {}", res->status, res->body.substr(0, 200)));
        } else {
            last_error = fmt::format("HTTP {}", res->status);
            if (res->has_header("Retry-After")) {
                try {
                    retry_after = std::chrono::seconds(std::stol(res->get_header_value("Retry-After")));
                } catch (const std::exception&) {
                }
            }
        }

        if (attempt == retry_.max_retries) break;
        double u;
        {
            std::lock_guard lock(jitter_mutex_);
            u = static_cast<double>(splitmix(jitter_state_) >> 11) * 0x1.0p-53;
        }
        retry_.sleep(std::max(std::min(retry_after, retry_.max_delay), retry_.delay_for(attempt, u)));
    }
    throw GatewayError(GatewayError::Kind::ExhaustedRetries,
                       fmt::format("ExhaustedRetries after {} attempts: {}", retry_.max_retries + 1, last_error));
}

}  // namespace crevtax
