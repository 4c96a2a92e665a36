#include "ragaudit/http_provider.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ragaudit/error.hpp"

namespace ragaudit {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host:port
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        throw ValidationError("provider endpoint must start with http:// (got '" + url + "')");
    }
    auto slash = url.find('/', scheme.size());
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpProviderConfig HttpProviderConfig::from_environment(HttpProviderConfig base) {
    if (const char* endpoint = std::getenv("RAGAUDIT_PROVIDER_ENDPOINT"); endpoint != nullptr && *endpoint) {
        base.endpoint = endpoint;
    }
    if (const char* token = std::getenv("RAGAUDIT_PROVIDER_TOKEN"); token != nullptr && *token) {
        base.auth_token = token;
    }
    return base;
}

struct HttpJsonClient::Impl {
    Endpoint endpoint;
    std::counting_semaphore<1024> slots;
    std::atomic<int> consecutive_failures{0};

    Impl(Endpoint e, std::size_t max_in_flight)
        : endpoint(std::move(e)), slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(max_in_flight, 1, 1024))) {}
};

HttpJsonClient::HttpJsonClient(HttpProviderConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(split_endpoint(config_.endpoint), config_.max_in_flight)) {}

HttpJsonClient::~HttpJsonClient() = default;

json HttpJsonClient::post(const json& body) const {
    impl_->slots.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{impl_->slots};

    httplib::Client client(impl_->endpoint.origin);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    httplib::Headers headers;
    if (!config_.auth_token.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.auth_token);
    }
    const std::string payload = body.dump();

    std::string last_error;
    auto backoff = config_.retry_backoff;
    const bool circuit_open = impl_->consecutive_failures.load() >= config_.circuit_threshold;
    const int retries = circuit_open ? 0 : config_.max_retries;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        auto result = client.Post(impl_->endpoint.path, headers, payload, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (retryable(result->status)) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        impl_->consecutive_failures.store(0);
        if (result->status < 200 || result->status >= 300) {
            throw ProviderError("provider returned HTTP " + std::to_string(result->status));
        }
        json reply = json::parse(result->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object()) {
            throw ProviderError("provider reply is not a JSON object");
        }
        return reply;
    }
    impl_->consecutive_failures.fetch_add(1);
    throw ProviderError("provider unavailable after " + std::to_string(retries + 1) +
                        " attempts: " + last_error);
}

StanceJudgement HttpStanceProvider::judge(const Claim& claim, const Article& article) const {
    auto reply = client_.post(json{{"task", "stance"},
                                   {"claim", claim.text},
                                   {"evidence_title", article.title},
                                   {"evidence_abstract", article.abstract}});
    auto it = reply.find("stance");
    if (it == reply.end()) {
        throw ProviderError("stance reply has no 'stance' field");
    }
    std::optional<Stance> stance;
    if (it->is_string()) {
        stance = parse_stance(it->get<std::string>());
    }
    if (!stance) {
        spdlog::warn("coercing out-of-enum stance reply {} to neutral", it->dump());
        return {Stance::Neutral, true, "unrecognized stance " + it->dump()};
    }
    return {*stance, false, std::nullopt};
}

double HttpSimilarityProvider::similarity(std::string_view a, std::string_view b) const {
    auto reply = client_.post(json{{"task", "similarity"}, {"a", a}, {"b", b}});
    auto it = reply.find("score");
    if (it == reply.end() || !it->is_number()) {
        throw ProviderError("similarity reply has no numeric 'score'");
    }
    double score = it->get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
        throw ProviderError("similarity score outside [0, 1]");
    }
    return score;
}

}  // namespace ragaudit
