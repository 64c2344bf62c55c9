#pragma once

#include "hypoforge/gateway.hpp"
#include "hypoforge/llm.hpp"
#include "hypoforge/util.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace hypoforge {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class BackendKind { Live, Scripted, Replay };

std::optional<BackendKind> backend_kind_from_string(const std::string& s);

struct BackendSettings {
    std::string base_url;
    std::string model_id;
    std::string completion_path = "/v1/chat/completions";
    std::string api_key_env;  // secrets come from the environment only
};

struct PipelineConfig {
    std::string domain = "alloy";
    BackendKind backend_kind = BackendKind::Live;

    BackendSettings backend;       // primary (extraction/generation/...)
    BackendSettings eval_backend;  // evaluation stage

    // generation
    int n_samples = 3;
    std::optional<size_t> pair_cap;
    uint64_t seed = 0;

    // categorization
    int chunk_count = 5;
    int idea_cap = 50;
    int turn_budget = 10;

    GatewayConfig gateway;
    ProfileConfig profiles;

    // paths (relative paths resolve against the config file's directory)
    fs::path corpus_manifest = "corpus.json";
    fs::path text_root = "texts";
    fs::path runs_root = "runs";
    fs::path fixtures_dir;
    fs::path annotations_csv;      // optional: hypothesis_id,synergy,grounding
    fs::path hmi_counts_csv;       // optional: chart_id,incorrect,partially_correct,correct,core_idea_present
    fs::path mechanism_flags_csv;  // optional: chart_id,row_index,which,label_correct,mechanistic_correct

    // visualize: emit hypothesis graphs for the whole Strong+Synergistic
    // pool ("pool") or none ("none"); single ids come from the CLI flag.
    std::string hypothesis_graphs = "none";

    nlohmann::json snapshot;  // full config as loaded, for the run manifest

    DomainProfile domain_profile() const;
};

PipelineConfig load_config(const fs::path& path);
PipelineConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir);

/// Defaults: k=5, idea cap 50, token cap 4000, temperatures 0.0/1.0,
/// 5 retry attempts, 4 requests in flight.
PipelineConfig default_config();

void validate_config(const PipelineConfig& config);

/// Content digest of the canonical config snapshot + backend kind; the
/// first 12 hex characters seed the run id.
std::string config_digest(const PipelineConfig& config);

}  // namespace hypoforge
