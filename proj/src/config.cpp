#include "hypoforge/config.hpp"

namespace hypoforge {

using json = nlohmann::json;

std::optional<BackendKind> backend_kind_from_string(const std::string& s) {
    if (s == "live") return BackendKind::Live;
    if (s == "scripted") return BackendKind::Scripted;
    if (s == "replay") return BackendKind::Replay;
    return std::nullopt;
}

DomainProfile PipelineConfig::domain_profile() const {
    if (domain == "alloy") return alloy_domain_profile();
    if (domain == "battery") return battery_domain_profile();
    if (snapshot.contains("domains") && snapshot["domains"].contains(domain)) {
        const auto& dj = snapshot["domains"][domain];
        DomainProfile p;
        p.name = domain;
        p.system_message = dj.value("system_message", "");
        p.grounding_criterion = dj.value("grounding_criterion", "");
        p.compound_mode = dj.value("compound_mode", false);
        return p;
    }
    throw ConfigError("unknown domain profile: " + domain);
}

PipelineConfig default_config() {
    PipelineConfig c;
    c.backend.model_id = "gpt-4-1106-preview";
    c.backend.api_key_env = "HYPOFORGE_API_KEY";
    c.eval_backend.model_id = "gemini-1.5-pro";
    c.eval_backend.api_key_env = "HYPOFORGE_EVAL_API_KEY";
    c.snapshot = json::object();
    return c;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

void read_backend(const json& j, BackendSettings& out) {
    out.base_url = j.value("base_url", out.base_url);
    out.model_id = j.value("model_id", out.model_id);
    out.completion_path = j.value("completion_path", out.completion_path);
    out.api_key_env = j.value("api_key_env", out.api_key_env);
}

}  // namespace

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
    PipelineConfig c = default_config();
    c.snapshot = j;

    c.domain = j.value("domain", c.domain);
    if (j.contains("backend")) {
        read_backend(j["backend"], c.backend);
        std::string kind = j["backend"].value("kind", "live");
        auto parsed = backend_kind_from_string(kind);
        if (!parsed) throw ConfigError("unknown backend kind: " + kind);
        c.backend_kind = *parsed;
    }
    if (j.contains("eval_backend")) read_backend(j["eval_backend"], c.eval_backend);

    if (j.contains("generation")) {
        const auto& g = j["generation"];
        c.n_samples = g.value("n_samples", c.n_samples);
        if (g.contains("pair_cap") && !g["pair_cap"].is_null())
            c.pair_cap = g["pair_cap"].get<size_t>();
        c.seed = g.value("seed", c.seed);
    }
    if (j.contains("categorization")) {
        const auto& k = j["categorization"];
        c.chunk_count = k.value("chunks", c.chunk_count);
        c.idea_cap = k.value("idea_cap", c.idea_cap);
        c.turn_budget = k.value("turn_budget", c.turn_budget);
    }
    if (j.contains("gateway")) {
        const auto& g = j["gateway"];
        c.gateway.max_attempts = g.value("max_attempts", c.gateway.max_attempts);
        c.gateway.max_in_flight = g.value("max_in_flight", c.gateway.max_in_flight);
        c.gateway.backoff_base_ms = g.value("backoff_base_ms", c.gateway.backoff_base_ms);
        c.gateway.backoff_cap_ms = g.value("backoff_cap_ms", c.gateway.backoff_cap_ms);
        if (g.contains("cache_dir"))
            c.gateway.cache_dir = resolve(base_dir, g["cache_dir"].get<std::string>());
    }
    if (j.contains("profiles")) {
        const auto& p = j["profiles"];
        c.profiles.max_output_tokens = p.value("max_output_tokens", 4000);
        if (p.contains("temperature_overrides")) {
            for (const auto& [stage, temp] : p["temperature_overrides"].items())
                c.profiles.temperature_overrides[stage] = temp.get<double>();
        }
    }
    c.profiles.primary_model_id = c.backend.model_id;
    c.profiles.eval_model_id = c.eval_backend.model_id;

    if (j.contains("paths")) {
        const auto& p = j["paths"];
        if (p.contains("corpus_manifest"))
            c.corpus_manifest = resolve(base_dir, p["corpus_manifest"].get<std::string>());
        if (p.contains("text_root"))
            c.text_root = resolve(base_dir, p["text_root"].get<std::string>());
        if (p.contains("runs_root"))
            c.runs_root = resolve(base_dir, p["runs_root"].get<std::string>());
        if (p.contains("fixtures"))
            c.fixtures_dir = resolve(base_dir, p["fixtures"].get<std::string>());
        if (p.contains("annotations"))
            c.annotations_csv = resolve(base_dir, p["annotations"].get<std::string>());
        if (p.contains("hmi_counts"))
            c.hmi_counts_csv = resolve(base_dir, p["hmi_counts"].get<std::string>());
        if (p.contains("mechanism_flags"))
            c.mechanism_flags_csv = resolve(base_dir, p["mechanism_flags"].get<std::string>());
    }
    if (j.contains("visualization"))
        c.hypothesis_graphs = j["visualization"].value("hypothesis_graphs", c.hypothesis_graphs);

    validate_config(c);
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

void validate_config(const PipelineConfig& c) {
    auto positive = [](long v, const char* name) {
        if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(c.n_samples, "generation.n_samples");
    positive(c.chunk_count, "categorization.chunks");
    positive(c.idea_cap, "categorization.idea_cap");
    positive(c.turn_budget, "categorization.turn_budget");
    positive(c.gateway.max_attempts, "gateway.max_attempts");
    positive(c.gateway.max_in_flight, "gateway.max_in_flight");
    positive(c.profiles.max_output_tokens, "profiles.max_output_tokens");
    if (c.pair_cap && *c.pair_cap == 0) throw ConfigError("generation.pair_cap must be positive");
    if (c.gateway.backoff_base_ms < 0 || c.gateway.backoff_cap_ms < 0)
        throw ConfigError("gateway backoff must be >= 0");
    for (const auto& [stage, temp] : c.profiles.temperature_overrides) {
        if (!stage_from_string(stage))
            throw ConfigError("temperature override for unknown stage: " + stage);
        if (temp < 0.0 || temp > 2.0)
            throw ConfigError("temperature override out of [0,2]: " + stage);
    }
    if (c.backend_kind == BackendKind::Scripted && c.fixtures_dir.empty())
        throw ConfigError("scripted backend needs a fixtures directory (paths.fixtures or --fixtures)");
    DomainProfile domain = c.domain_profile();  // throws on unknown domain
    if (domain.system_message.empty())
        throw ConfigError("domain \"" + domain.name + "\" has no system message");
    if (domain.grounding_criterion.empty())
        throw ConfigError("domain \"" + domain.name + "\" has no grounding criterion");
}

std::string config_digest(const PipelineConfig& config) {
    json canonical = config.snapshot;
    canonical["__backend_kind"] = static_cast<int>(config.backend_kind);
    return sha256_hex(canonical.dump());
}

}  // namespace hypoforge
