#pragma once

#include "hypoforge/llm.hpp"
#include "hypoforge/util.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hypoforge {

/// Raised by backends; transient failures are retried by the gateway,
/// anything else fails the call immediately.
class BackendError : public Error {
public:
    BackendError(const std::string& msg, bool transient)
        : Error(msg), transient_(transient) {}
    bool transient() const { return transient_; }

private:
    bool transient_;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual LlmResponse send(const LlmRequest& request) = 0;
    virtual std::string id() const = 0;
};

// ---- scripted fixture backend ----

/// Deterministic offline backend. Replies come from an exact digest map
/// or, failing that, the first rule whose substrings all occur in the
/// request text. Performs no network activity by construction; every call
/// is recorded in a ledger so tests can assert call counts.
class ScriptedBackend : public Backend {
public:
    struct Rule {
        std::string name;
        std::vector<std::string> all_of;  // substrings over system message + prompt
        std::string reply;
        FinishReason finish = FinishReason::Complete;
        int fail_times = 0;  // fail transiently this many times before replying
        int delay_ms = 0;
    };

    struct CallRecord {
        std::string digest;
        std::string matched;  // rule name or "digest:<hex>"
    };

    ScriptedBackend() = default;

    /// Load fixtures from <dir>/script.json (rules with inline replies or
    /// reply_file paths relative to the directory).
    static std::shared_ptr<ScriptedBackend> from_fixture_dir(const fs::path& dir);
    void load_fixture_dir(const fs::path& dir);

    void add_digest_reply(const std::string& digest, std::string reply,
                          FinishReason finish = FinishReason::Complete);
    void add_rule(Rule rule);

    LlmResponse send(const LlmRequest& request) override;
    std::string id() const override { return "scripted"; }

    std::vector<CallRecord> ledger() const;
    size_t calls() const;
    /// Highest number of sends observed in flight at once.
    int max_concurrent() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::pair<std::string, FinishReason>> by_digest_;
    std::vector<Rule> rules_;
    std::map<std::string, int> failures_used_;  // rule name -> transient fails served
    std::vector<CallRecord> ledger_;
    int in_flight_ = 0;
    int max_in_flight_ = 0;
};

// ---- transcript persistence ----

/// Content-addressed store of {request, response, timestamp} JSON files,
/// one per request digest. Writes are write-temp-then-rename.
class TranscriptStore {
public:
    explicit TranscriptStore(fs::path dir) : dir_(std::move(dir)) {}

    std::optional<LlmResponse> load(const std::string& digest) const;
    void store(const std::string& digest, const LlmRequest& request,
               const LlmResponse& response) const;

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
};

// ---- record / replay wrapper ----

/// Wraps an inner backend with a transcript store. Recorded requests are
/// replayed verbatim; misses go to the inner backend and get recorded. A
/// wrapper with no inner backend is pure replay: a miss is a hard error.
class RecordReplayBackend : public Backend {
public:
    RecordReplayBackend(std::shared_ptr<Backend> inner, TranscriptStore store)
        : inner_(std::move(inner)), store_(std::move(store)) {}

    LlmResponse send(const LlmRequest& request) override;
    std::string id() const override;

private:
    std::shared_ptr<Backend> inner_;
    TranscriptStore store_;
};

}  // namespace hypoforge
