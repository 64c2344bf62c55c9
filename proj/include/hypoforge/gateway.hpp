#pragma once

#include "hypoforge/backend.hpp"
#include "hypoforge/llm.hpp"

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

namespace hypoforge {

/// Stage-fatal gateway failure; carries the request digest so the failed
/// transcript can be located.
class GatewayError : public Error {
public:
    GatewayError(const std::string& msg, std::string digest)
        : Error(msg), digest_(std::move(digest)) {}
    const std::string& digest() const { return digest_; }

private:
    std::string digest_;
};

struct GatewayConfig {
    int max_attempts = 5;
    int max_in_flight = 4;
    int backoff_base_ms = 250;
    int backoff_cap_ms = 4000;
    fs::path cache_dir = "cache";
};

/// Durable-cached chat-completion front end. Responses are content-
/// addressed by request digest; transient backend failures are retried
/// with bounded exponential backoff; concurrent duplicates of one request
/// share a single backend call.
class Gateway {
public:
    explicit Gateway(GatewayConfig config)
        : config_(config),
          store_(config.cache_dir),
          slots_(std::max(1, config.max_in_flight)) {}

    LlmResponse complete(const LlmRequest& request, Backend& backend);

    const TranscriptStore& store() const { return store_; }
    const GatewayConfig& config() const { return config_; }

private:
    LlmResponse perform(const LlmRequest& request, Backend& backend,
                        const std::string& digest);

    GatewayConfig config_;
    TranscriptStore store_;
    std::counting_semaphore<1024> slots_;
    std::mutex mutex_;
    std::map<std::string, std::shared_future<LlmResponse>> in_flight_;
};

}  // namespace hypoforge
