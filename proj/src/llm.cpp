#include "hypoforge/llm.hpp"

namespace hypoforge {

using json = nlohmann::json;

std::string to_string(Stage s) {
    switch (s) {
        case Stage::Extraction: return "extraction";
        case Stage::Generation: return "generation";
        case Stage::Evaluation: return "evaluation";
        case Stage::Categorization: return "categorization";
        case Stage::Visualization: return "visualization";
    }
    return "unknown";
}

std::optional<Stage> stage_from_string(const std::string& s) {
    if (s == "extraction") return Stage::Extraction;
    if (s == "generation") return Stage::Generation;
    if (s == "evaluation") return Stage::Evaluation;
    if (s == "categorization") return Stage::Categorization;
    if (s == "visualization") return Stage::Visualization;
    return std::nullopt;
}

std::string to_string(FinishReason r) {
    switch (r) {
        case FinishReason::Complete: return "complete";
        case FinishReason::Truncated: return "truncated";
        case FinishReason::Error: return "error";
    }
    return "unknown";
}

std::string canonical_request_json(const LlmRequest& request) {
    // nlohmann::json keeps object keys sorted, which is exactly the
    // canonical form the digest needs.
    json j;
    j["model_id"] = request.model_id;
    j["system_message"] = request.system_message;
    j["user_prompt"] = request.user_prompt;
    j["temperature"] = request.temperature;
    j["max_output_tokens"] = request.max_output_tokens;
    json extras = json::object();
    for (const auto& [k, v] : request.extra_params) extras[k] = v;
    j["extra_params"] = extras;
    return j.dump();
}

std::string request_digest(const LlmRequest& request) {
    return sha256_hex(canonical_request_json(request));
}

DomainProfile alloy_domain_profile() {
    DomainProfile p;
    p.name = "alloy";
    p.system_message = "You are an expert in the alloy field of Materials Science and Engineering";
    p.grounding_criterion =
        "a Strong hypothesis explicitly harnesses phenomena or mechanisms specific to "
        "cryogenic conditions; a Weak hypothesis lacks this cryogenic specificity";
    p.compound_mode = false;
    return p;
}

DomainProfile battery_domain_profile() {
    DomainProfile p;
    p.name = "battery";
    p.system_message =
        "You possess expertise in the field of all-solid-state Lithium battery research";
    p.grounding_criterion =
        "a Strong hypothesis incorporates mechanisms that contribute to "
        "formability/malleability; a Weak hypothesis does not";
    p.compound_mode = true;
    return p;
}

LlmRequest StageProfile::make_request(std::string user_prompt) const {
    LlmRequest req;
    req.model_id = model_id;
    req.system_message = system_message;
    req.user_prompt = std::move(user_prompt);
    req.temperature = temperature;
    req.max_output_tokens = max_output_tokens;
    req.extra_params = extra_params;
    return req;
}

StageProfile build_profile(Stage stage, const DomainProfile& domain,
                           const ProfileConfig& config) {
    if (domain.system_message.empty())
        throw Error("domain profile \"" + domain.name + "\" has no system message");

    StageProfile p;
    p.stage = stage;
    p.system_message = domain.system_message;
    p.max_output_tokens = config.max_output_tokens;
    p.temperature = (stage == Stage::Generation) ? 1.0 : 0.0;

    if (stage == Stage::Evaluation) {
        p.model_id = config.eval_model_id;
        p.extra_params["top_p"] = 0.95;
        p.extra_params["top_k"] = 64;
    } else {
        p.model_id = config.primary_model_id;
        p.extra_params["frequency_penalty"] = 0.0;
        p.extra_params["presence_penalty"] = 0.0;
        p.extra_params["top_p"] = 1.0;
    }

    auto it = config.temperature_overrides.find(to_string(stage));
    if (it != config.temperature_overrides.end()) p.temperature = it->second;
    return p;
}

}  // namespace hypoforge
