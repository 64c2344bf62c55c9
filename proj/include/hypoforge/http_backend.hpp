#pragma once

#include "hypoforge/backend.hpp"

#include <atomic>
#include <string>

namespace hypoforge {

/// Generic chat-completion HTTP backend (OpenAI-compatible wire shape:
/// POST {base_url}{completion_path} with bearer auth). Covers both vendor
/// models through a configurable base URL instead of vendor SDKs.
class HttpBackend : public Backend {
public:
    struct Settings {
        std::string base_url;                             // e.g. https://api.example.com
        std::string completion_path = "/v1/chat/completions";
        std::string api_key;
        int timeout_seconds = 120;
        std::string backend_id = "http";
    };

    explicit HttpBackend(Settings settings) : settings_(std::move(settings)) {}

    LlmResponse send(const LlmRequest& request) override;
    std::string id() const override { return settings_.backend_id; }

    /// Process-wide count of outbound HTTP attempts; offline tests assert
    /// this stays at zero.
    static uint64_t outbound_calls();
    static void reset_outbound_calls();

private:
    Settings settings_;
    static std::atomic<uint64_t> outbound_calls_;
};

}  // namespace hypoforge
