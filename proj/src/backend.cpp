#include "hypoforge/backend.hpp"

#include <json.hpp>

#include <chrono>
#include <thread>

namespace hypoforge {

using ordered_json = nlohmann::ordered_json;

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_fixture_dir(const fs::path& dir) {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->load_fixture_dir(dir);
    return backend;
}

void ScriptedBackend::load_fixture_dir(const fs::path& dir) {
    fs::path script = dir / "script.json";
    ordered_json j = ordered_json::parse(read_file(script));
    for (const auto& rj : j.at("rules")) {
        std::string reply;
        if (rj.contains("reply_file")) {
            reply = read_file(dir / rj.at("reply_file").get<std::string>());
        } else {
            reply = rj.value("reply", "");
        }
        FinishReason finish = FinishReason::Complete;
        if (rj.value("finish_reason", "") == "truncated") finish = FinishReason::Truncated;
        if (rj.contains("digest")) {
            add_digest_reply(rj.at("digest").get<std::string>(), reply, finish);
            continue;
        }
        Rule rule;
        rule.name = rj.value("name", "rule" + std::to_string(rules_.size()));
        for (const auto& s : rj.value("all_of", std::vector<std::string>{})) rule.all_of.push_back(s);
        rule.reply = std::move(reply);
        rule.finish = finish;
        rule.fail_times = rj.value("fail_times", 0);
        rule.delay_ms = rj.value("delay_ms", 0);
        add_rule(std::move(rule));
    }
}

void ScriptedBackend::add_digest_reply(const std::string& digest, std::string reply,
                                       FinishReason finish) {
    std::lock_guard lock(mutex_);
    by_digest_[digest] = {std::move(reply), finish};
}

void ScriptedBackend::add_rule(Rule rule) {
    std::lock_guard lock(mutex_);
    rules_.push_back(std::move(rule));
}

LlmResponse ScriptedBackend::send(const LlmRequest& request) {
    std::string digest = request_digest(request);
    std::string haystack = request.system_message + "\n" + request.user_prompt;

    int delay_ms = 0;
    LlmResponse resp;
    resp.backend_id = id();
    {
        std::lock_guard lock(mutex_);
        ++in_flight_;
        max_in_flight_ = std::max(max_in_flight_, in_flight_);

        auto it = by_digest_.find(digest);
        if (it != by_digest_.end()) {
            ledger_.push_back({digest, "digest:" + digest});
            resp.text = it->second.first;
            resp.finish_reason = it->second.second;
        } else {
            const Rule* hit = nullptr;
            for (const auto& rule : rules_) {
                bool all = true;
                for (const auto& needle : rule.all_of) {
                    if (haystack.find(needle) == std::string::npos) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    hit = &rule;
                    break;
                }
            }
            if (!hit) {
                ledger_.push_back({digest, "<no match>"});
                --in_flight_;
                throw BackendError("scripted backend has no fixture for request " + digest +
                                       "; prompt starts: " +
                                       request.user_prompt.substr(0, 120),
                                   /*transient=*/false);
            }
            ledger_.push_back({digest, hit->name});
            if (failures_used_[hit->name] < hit->fail_times) {
                ++failures_used_[hit->name];
                --in_flight_;
                throw BackendError("scripted transient failure (" + hit->name + ")",
                                   /*transient=*/true);
            }
            resp.text = hit->reply;
            resp.finish_reason = hit->finish;
            delay_ms = hit->delay_ms;
        }
    }

    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    return resp;
}

std::vector<ScriptedBackend::CallRecord> ScriptedBackend::ledger() const {
    std::lock_guard lock(mutex_);
    return ledger_;
}

size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return ledger_.size();
}

int ScriptedBackend::max_concurrent() const {
    std::lock_guard lock(mutex_);
    return max_in_flight_;
}

namespace {

FinishReason finish_from_string(const std::string& s) {
    if (s == "truncated") return FinishReason::Truncated;
    if (s == "error") return FinishReason::Error;
    return FinishReason::Complete;
}

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

std::optional<LlmResponse> TranscriptStore::load(const std::string& digest) const {
    auto text = try_read_file(dir_ / (digest + ".json"));
    if (!text) return std::nullopt;
    ordered_json j = ordered_json::parse(*text);
    LlmResponse resp;
    const auto& rj = j.at("response");
    resp.text = rj.at("text").get<std::string>();
    resp.finish_reason = finish_from_string(rj.value("finish_reason", "complete"));
    resp.backend_id = rj.value("backend_id", "");
    resp.cached = true;
    return resp;
}

void TranscriptStore::store(const std::string& digest, const LlmRequest& request,
                            const LlmResponse& response) const {
    ordered_json j;
    j["request"] = ordered_json::parse(canonical_request_json(request));
    j["response"] = {{"text", response.text},
                     {"finish_reason", to_string(response.finish_reason)},
                     {"backend_id", response.backend_id}};
    j["timestamp"] = iso8601_now();
    atomic_write_file(dir_ / (digest + ".json"), j.dump(2) + "\n");
}

LlmResponse RecordReplayBackend::send(const LlmRequest& request) {
    std::string digest = request_digest(request);
    if (auto recorded = store_.load(digest)) return *recorded;
    if (!inner_)
        throw BackendError("replay miss: no recorded transcript for request " + digest,
                           /*transient=*/false);
    LlmResponse resp = inner_->send(request);
    store_.store(digest, request, resp);
    return resp;
}

std::string RecordReplayBackend::id() const {
    return inner_ ? "record(" + inner_->id() + ")" : "replay";
}

}  // namespace hypoforge
