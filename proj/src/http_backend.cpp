#include "hypoforge/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

namespace hypoforge {

using json = nlohmann::json;

std::atomic<uint64_t> HttpBackend::outbound_calls_{0};

uint64_t HttpBackend::outbound_calls() { return outbound_calls_.load(); }
void HttpBackend::reset_outbound_calls() { outbound_calls_ = 0; }

LlmResponse HttpBackend::send(const LlmRequest& request) {
    if (settings_.base_url.empty())
        throw BackendError("http backend has no base_url configured", /*transient=*/false);

    json body;
    body["model"] = request.model_id;
    body["messages"] = json::array({{{"role", "system"}, {"content", request.system_message}},
                                    {{"role", "user"}, {"content", request.user_prompt}}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;
    for (const auto& [k, v] : request.extra_params) body[k] = v;

    httplib::Client client(settings_.base_url);
    client.set_connection_timeout(settings_.timeout_seconds, 0);
    client.set_read_timeout(settings_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!settings_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + settings_.api_key);

    outbound_calls_.fetch_add(1);
    auto res = client.Post(settings_.completion_path, headers, body.dump(), "application/json");
    if (!res)
        throw BackendError("http backend: connection to " + settings_.base_url + " failed (" +
                               httplib::to_string(res.error()) + ")",
                           /*transient=*/true);
    if (res->status == 429 || res->status >= 500)
        throw BackendError("http backend: status " + std::to_string(res->status),
                           /*transient=*/true);
    if (res->status != 200)
        throw BackendError("http backend: status " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 200),
                           /*transient=*/false);

    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const std::exception& e) {
        throw BackendError("http backend: unparseable response body: " + std::string(e.what()),
                           /*transient=*/false);
    }

    LlmResponse out;
    out.backend_id = settings_.backend_id;
    try {
        const auto& choice = reply.at("choices").at(0);
        out.text = choice.at("message").at("content").get<std::string>();
        std::string finish = choice.value("finish_reason", "stop");
        out.finish_reason =
            finish == "length" ? FinishReason::Truncated : FinishReason::Complete;
    } catch (const std::exception& e) {
        throw BackendError("http backend: response missing choices[0].message.content",
                           /*transient=*/false);
    }
    return out;
}

}  // namespace hypoforge
