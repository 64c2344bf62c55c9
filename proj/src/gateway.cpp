#include "hypoforge/gateway.hpp"

#include <chrono>
#include <thread>

namespace hypoforge {

LlmResponse Gateway::complete(const LlmRequest& request, Backend& backend) {
    std::string digest = request_digest(request);

    std::shared_future<LlmResponse> rider;
    std::promise<LlmResponse> promise;
    {
        std::lock_guard lock(mutex_);
        auto it = in_flight_.find(digest);
        if (it != in_flight_.end()) {
            rider = it->second;
        } else {
            if (auto cached = store_.load(digest)) return *cached;
            in_flight_[digest] = promise.get_future().share();
        }
    }
    if (rider.valid()) return rider.get();

    try {
        LlmResponse resp = perform(request, backend, digest);
        store_.store(digest, request, resp);
        {
            std::lock_guard lock(mutex_);
            promise.set_value(resp);
            in_flight_.erase(digest);
        }
        return resp;
    } catch (...) {
        std::lock_guard lock(mutex_);
        promise.set_exception(std::current_exception());
        in_flight_.erase(digest);
        throw;
    }
}

LlmResponse Gateway::perform(const LlmRequest& request, Backend& backend,
                             const std::string& digest) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};

    int attempts = std::max(1, config_.max_attempts);
    int delay_ms = config_.backoff_base_ms;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            return backend.send(request);
        } catch (const BackendError& e) {
            if (!e.transient())
                throw GatewayError(std::string("backend failure: ") + e.what() +
                                       " (request " + digest + ")",
                                   digest);
            if (attempt == attempts)
                throw GatewayError("retries exhausted after " + std::to_string(attempts) +
                                       " attempts: " + e.what() + " (request " + digest + ")",
                                   digest);
            if (delay_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms = std::min(delay_ms * 2, config_.backoff_cap_ms);
        }
    }
    throw GatewayError("unreachable retry state (request " + digest + ")", digest);
}

}  // namespace hypoforge
