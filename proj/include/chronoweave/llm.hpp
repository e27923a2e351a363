#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

namespace chronoweave {

struct LlmRequest {
    std::string model;
    std::string prompt;  // non-empty
    double temperature = 0.0;
    int max_output_tokens = 1024;
};

struct LlmResponse {
    std::string text;
    std::string backend;
    bool cached = false;
    std::int64_t latency_ms = 0;  // 0 when served from cache
};

// Digest over (model, temperature at six decimal places, max_output_tokens,
// prompt), in that order, newline-separated. Deterministic across runs.
std::string cache_key(const LlmRequest& request);

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string name() const = 0;
    // Returns the completion text. Throws BackendError (transient flag set for
    // retryable failures) or ProtocolError for unusable payloads.
    virtual std::string complete(const LlmRequest& request) = 0;
};

// Deterministic offline stand-in: re-parses the prompt it is given, labels a
// context item RELEVANT when its title shares at least two terms with the
// target title, and writes a citation-clean background story when the prompt
// carries the extended task. Doubles as the gold-label rule in tests.
LlmResponse mock_complete(const LlmRequest& request);

// The mock's labeling rule in isolation: at least two shared distinct terms
// between the two titles. Gold-label synthesis uses the same function.
bool mock_relevance_rule(const std::string& target_title, const std::string& candidate_title);

class MockBackend final : public LlmBackend {
public:
    std::string name() const override { return "mock"; }
    std::string complete(const LlmRequest& request) override;
};

struct HttpBackendConfig {
    std::string base_url;  // full endpoint URL of a JSON chat-completion API
    std::string api_key;   // sent as a bearer token when non-empty
    int timeout_ms = 60000;
};

class HttpBackend final : public LlmBackend {
public:
    explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}
    std::string name() const override { return "http"; }
    std::string complete(const LlmRequest& request) override;

private:
    HttpBackendConfig config_;
};

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;  // exponential backoff with full jitter
};

// Completion client: consults the on-disk cache first, collapses concurrent
// identical misses into one upstream call, retries transient failures, and
// caps in-flight backend calls. Safe for concurrent callers.
class LlmClient {
public:
    using SleepFn = std::function<void(std::chrono::milliseconds)>;

    LlmClient(std::shared_ptr<LlmBackend> backend, std::filesystem::path cache_dir, RetryPolicy retry = {},
              int max_in_flight = 4);

    LlmResponse complete(const LlmRequest& request);

    // Test hook; replaces the real sleep between retry attempts.
    void set_sleep_fn(SleepFn fn);

    std::uint64_t backend_calls() const { return backend_calls_.load(); }
    std::uint64_t retries() const { return retries_.load(); }
    std::uint64_t cache_hits() const { return cache_hits_.load(); }

private:
    struct Flight {
        std::shared_future<LlmResponse> future;
    };

    LlmResponse call_backend(const LlmRequest& request);
    std::chrono::milliseconds jittered_delay(int attempt);

    std::shared_ptr<LlmBackend> backend_;
    std::filesystem::path cache_dir_;
    RetryPolicy retry_;
    std::counting_semaphore<1024> in_flight_slots_;
    SleepFn sleep_fn_;

    std::mutex mutex_;  // guards flights_ and jitter_rng state
    std::unordered_map<std::string, std::shared_ptr<Flight>> flights_;
    std::uint64_t jitter_state_ = 0x9e3779b97f4a7c15ull;

    std::atomic<std::uint64_t> backend_calls_{0};
    std::atomic<std::uint64_t> retries_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
};

struct CacheStats {
    std::size_t entries = 0;
    std::uintmax_t bytes = 0;
    std::vector<std::string> keys;  // sorted
};

CacheStats cache_inspect(const std::filesystem::path& cache_dir);
std::size_t cache_clear(const std::filesystem::path& cache_dir);

}  // namespace chronoweave
