#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "ragaudit/claims.hpp"
#include "ragaudit/stance.hpp"

namespace ragaudit {

/// Connection settings for an external judge speaking the JSON wire contract:
///
///   POST {"task": "stance", "claim": ..., "evidence_title": ..., "evidence_abstract": ...}
///     -> {"stance": "support" | "contradict" | "neutral"}
///   POST {"task": "similarity", "a": ..., "b": ...}
///     -> {"score": <real in [0, 1]>}
struct HttpProviderConfig {
    std::string endpoint;    // http://host[:port][/path]
    std::string auth_token;  // sent as "Authorization: Bearer <token>" when non-empty
    std::chrono::milliseconds timeout{30'000};
    std::size_t max_in_flight = 4;
    int max_retries = 2;  // extra attempts after connection errors, 429 and 5xx
    std::chrono::milliseconds retry_backoff{200};
    /// After this many consecutive calls fail outright, later calls make a
    /// single attempt until one succeeds again.
    int circuit_threshold = 8;

    /// Reads RAGAUDIT_PROVIDER_ENDPOINT and RAGAUDIT_PROVIDER_TOKEN over `base`.
    static HttpProviderConfig from_environment(HttpProviderConfig base);
    static HttpProviderConfig from_environment() { return from_environment(HttpProviderConfig{}); }
};

/// Blocking JSON-over-HTTP POST with an in-flight cap. Thread-safe.
class HttpJsonClient {
public:
    explicit HttpJsonClient(HttpProviderConfig config);
    ~HttpJsonClient();
    HttpJsonClient(const HttpJsonClient&) = delete;
    HttpJsonClient& operator=(const HttpJsonClient&) = delete;

    /// Throws ProviderError on transport failure, non-2xx status, or a body
    /// that is not a JSON object.
    nlohmann::json post(const nlohmann::json& body) const;

    const HttpProviderConfig& config() const noexcept { return config_; }

private:
    struct Impl;
    HttpProviderConfig config_;
    std::unique_ptr<Impl> impl_;
};

class HttpStanceProvider final : public StanceProvider {
public:
    explicit HttpStanceProvider(HttpProviderConfig config) : client_(std::move(config)) {}

    std::string tag() const override { return "http"; }
    StanceJudgement judge(const Claim& claim, const Article& article) const override;
    std::size_t max_in_flight() const override { return client_.config().max_in_flight; }

private:
    HttpJsonClient client_;
};

class HttpSimilarityProvider final : public SimilarityProvider {
public:
    explicit HttpSimilarityProvider(HttpProviderConfig config) : client_(std::move(config)) {}

    /// Throws ProviderError when the reply has no numeric score in [0, 1].
    double similarity(std::string_view a, std::string_view b) const override;

private:
    HttpJsonClient client_;
};

}  // namespace ragaudit
