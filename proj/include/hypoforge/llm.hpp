#pragma once

#include "hypoforge/util.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

namespace hypoforge {

enum class Stage { Extraction, Generation, Evaluation, Categorization, Visualization };

std::string to_string(Stage s);
std::optional<Stage> stage_from_string(const std::string& s);

enum class FinishReason { Complete, Truncated, Error };

std::string to_string(FinishReason r);

/// A fully specified chat call. extra_params is a sorted map so the
/// canonical serialization (and hence the digest) ignores insertion order.
struct LlmRequest {
    std::string model_id;
    std::string system_message;
    std::string user_prompt;
    double temperature = 0.0;
    int max_output_tokens = 4000;
    std::map<std::string, nlohmann::json> extra_params;
};

struct LlmResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::Complete;
    std::string backend_id;
    bool cached = false;
};

/// Canonical (sorted-key, compact) JSON serialization of a request.
std::string canonical_request_json(const LlmRequest& request);

/// SHA-256 hex digest of the canonical serialization. Equal requests give
/// equal digests; any field change gives a different digest.
std::string request_digest(const LlmRequest& request);

/// Per-domain prompt tailoring: system message, the Strong/Weak grounding
/// criterion, and whether generation must insist on compounds over
/// composites.
struct DomainProfile {
    std::string name;
    std::string system_message;
    std::string grounding_criterion;
    bool compound_mode = false;
};

/// Built-in profiles for the two demonstration domains.
DomainProfile alloy_domain_profile();
DomainProfile battery_domain_profile();

/// Per-stage request parameters. Generation runs at temperature 1.0,
/// every other stage at 0.0 unless overridden.
struct StageProfile {
    Stage stage = Stage::Extraction;
    double temperature = 0.0;
    std::string model_id;
    std::string system_message;
    int max_output_tokens = 4000;
    std::map<std::string, nlohmann::json> extra_params;

    LlmRequest make_request(std::string user_prompt) const;
};

struct ProfileConfig {
    std::string primary_model_id = "gpt-4-1106-preview";
    std::string eval_model_id = "gemini-1.5-pro";
    int max_output_tokens = 4000;
    std::map<std::string, double> temperature_overrides;  // stage name -> temp
};

StageProfile build_profile(Stage stage, const DomainProfile& domain,
                           const ProfileConfig& config);

}  // namespace hypoforge
