#include "chronoweave/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "chronoweave/dates.hpp"
#include "chronoweave/digest.hpp"
#include "chronoweave/errors.hpp"
#include "chronoweave/fetch.hpp"
#include "chronoweave/fsio.hpp"
#include "chronoweave/prompting.hpp"
#include "chronoweave/retrieval.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

using nlohmann::json;

std::string cache_key(const LlmRequest& request) {
    char temperature[32];
    std::snprintf(temperature, sizeof(temperature), "%.6f", request.temperature);
    std::string canonical = request.model;
    canonical.push_back('\n');
    canonical.append(temperature);
    canonical.push_back('\n');
    canonical.append(std::to_string(request.max_output_tokens));
    canonical.push_back('\n');
    canonical.append(request.prompt);  // unbounded field goes last
    return digest128_hex(canonical);
}

// ---------------------------------------------------------------------------
// Mock backend
// ---------------------------------------------------------------------------

namespace {

struct ParsedSnippetLine {
    int index = 0;
    std::string date;
    std::string title;
};

// Inverse of prompting's context_line: "<i>. [<date>] <title> || <excerpt>".
std::optional<ParsedSnippetLine> parse_context_line(std::string_view line) {
    std::size_t pos = 0;
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::size_t digit_start = pos;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == digit_start || pos - digit_start > 9) return std::nullopt;
    ParsedSnippetLine parsed;
    parsed.index = std::stoi(std::string(line.substr(digit_start, pos - digit_start)));
    if (line.substr(pos, 3) != ". [") return std::nullopt;
    pos += 3;
    std::size_t bracket = line.find("] ", pos);
    if (bracket == std::string_view::npos) return std::nullopt;
    parsed.date = std::string(line.substr(pos, bracket - pos));
    std::string_view rest = line.substr(bracket + 2);
    std::size_t sep = rest.find(" || ");
    parsed.title = std::string(sep == std::string_view::npos ? rest : rest.substr(0, sep));
    return parsed;
}

std::size_t shared_term_count(const std::string& a, const std::string& b) {
    auto terms_a = tokenize(a);
    auto terms_b = tokenize(b);
    std::set<std::string> set_a(terms_a.begin(), terms_a.end());
    std::set<std::string> set_b(terms_b.begin(), terms_b.end());
    std::size_t shared = 0;
    for (const auto& t : set_a) {
        if (set_b.count(t) != 0) ++shared;
    }
    return shared;
}

std::string strip_brackets(std::string s) {
    for (char& c : s) {
        if (c == '[') c = '(';
        if (c == ']') c = ')';
    }
    return s;
}

}  // namespace

bool mock_relevance_rule(const std::string& target_title, const std::string& candidate_title) {
    return shared_term_count(candidate_title, target_title) >= 2;
}

LlmResponse mock_complete(const LlmRequest& request) {
    std::optional<std::string> target_title;
    std::vector<ParsedSnippetLine> snippets;
    bool saw_context_header = false;

    for (std::string_view line : split_lines(request.prompt)) {
        std::string trimmed = trim(line);
        if (!target_title && starts_with(trimmed, "Title: ")) {
            target_title = trimmed.substr(7);
        } else if (trimmed == "Context News:") {
            saw_context_header = true;
        } else if (auto parsed = parse_context_line(line)) {
            snippets.push_back(std::move(*parsed));
        }
    }
    if (!target_title || !saw_context_header) {
        throw MockError("prompt lacks the structural markers the mock backend relies on");
    }
    bool extended = request.prompt.find(kStoryMarker) != std::string::npos;

    std::string out;
    std::vector<const ParsedSnippetLine*> relevant;
    for (const auto& snippet : snippets) {
        std::size_t shared = shared_term_count(snippet.title, *target_title);
        bool is_relevant = shared >= 2;
        if (is_relevant) relevant.push_back(&snippet);
        out += std::to_string(snippet.index);
        out += is_relevant ? ". RELEVANT - shared terms: " : ". IRRELEVANT - shared terms: ";
        out += std::to_string(shared);
        out.push_back('\n');
    }
    if (extended) {
        out += kStoryMarker;
        out.push_back('\n');
        if (relevant.empty()) {
            out += "No relevant context items were identified among the provided candidates.\n";
        } else {
            for (const ParsedSnippetLine* snippet : relevant) {
                out += "On " + snippet->date + ", \"" + strip_brackets(snippet->title) +
                       "\" set the stage for this story [" + std::to_string(snippet->index) + "].\n";
            }
        }
    }
    return {out, "mock", false, 0};
}

std::string MockBackend::complete(const LlmRequest& request) {
    return mock_complete(request).text;
}

// ---------------------------------------------------------------------------
// HTTP backend
// ---------------------------------------------------------------------------

std::string HttpBackend::complete(const LlmRequest& request) {
    auto parts = split_url(config_.base_url);
    if (!parts) throw BackendError("invalid backend base URL: \"" + config_.base_url + "\"", false);

    std::string origin = parts->scheme + "://" + parts->host;
    if (parts->port != 0) origin += ":" + std::to_string(parts->port);

    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));

    json payload;
    payload["model"] = request.model;
    payload["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
    payload["temperature"] = request.temperature;
    payload["max_tokens"] = request.max_output_tokens;

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto result = client.Post(parts->path_query, headers, payload.dump(), "application/json");
    if (!result) {
        throw BackendError("backend transport failure: " + httplib::to_string(result.error()), true);
    }
    int status = result->status;
    if (status < 200 || status >= 300) {
        bool transient = status == 408 || status == 429 || status >= 500;
        throw BackendError("backend returned HTTP " + std::to_string(status), transient, status);
    }
    json body = json::parse(result->body, nullptr, false);
    if (body.is_discarded()) throw ProtocolError("backend payload is not valid JSON");
    try {
        const json& choice = body.at("choices").at(0);
        if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
        return choice.at("text").get<std::string>();
    } catch (const json::exception&) {
        throw ProtocolError("backend payload lacks choices[0].message.content");
    }
}

// ---------------------------------------------------------------------------
// Client: cache + single-flight + retries
// ---------------------------------------------------------------------------

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& key) {
    return dir / (key + ".json");
}

std::optional<LlmResponse> read_cache_entry(const std::filesystem::path& dir, const std::string& key) {
    std::filesystem::path path = cache_path(dir, key);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const Error&) {
        return std::nullopt;
    }
    json obj = json::parse(raw, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("response_text")) return std::nullopt;
    LlmResponse response;
    response.text = obj["response_text"].get<std::string>();
    response.backend = obj.value("backend", std::string("unknown"));
    response.cached = true;
    response.latency_ms = 0;
    return response;
}

void write_cache_entry(const std::filesystem::path& dir, const std::string& key, const LlmRequest& request,
                       const LlmResponse& response) {
    std::filesystem::create_directories(dir);
    json obj;
    obj["key"] = key;
    obj["model"] = request.model;
    obj["prompt"] = request.prompt;
    obj["temperature"] = request.temperature;
    obj["max_output_tokens"] = request.max_output_tokens;
    obj["response_text"] = response.text;
    obj["backend"] = response.backend;
    obj["created_at"] = format_iso_date_time(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count());
    atomic_write_file(cache_path(dir, key), obj.dump(2) + "\n");
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

LlmClient::LlmClient(std::shared_ptr<LlmBackend> backend, std::filesystem::path cache_dir, RetryPolicy retry,
                     int max_in_flight)
    : backend_(std::move(backend)),
      cache_dir_(std::move(cache_dir)),
      retry_(retry),
      in_flight_slots_(std::clamp(max_in_flight, 1, 1024)),
      sleep_fn_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

void LlmClient::set_sleep_fn(SleepFn fn) {
    sleep_fn_ = std::move(fn);
}

std::chrono::milliseconds LlmClient::jittered_delay(int attempt) {
    double ceiling = static_cast<double>(retry_.base_delay.count());
    for (int i = 0; i < attempt; ++i) ceiling *= retry_.factor;
    double fraction;
    {
        std::lock_guard lock(mutex_);
        fraction = static_cast<double>(splitmix64(jitter_state_) >> 11) / 9007199254740992.0;
    }
    return std::chrono::milliseconds(static_cast<std::int64_t>(ceiling * fraction));
}

LlmResponse LlmClient::call_backend(const LlmRequest& request) {
    for (int attempt = 0;; ++attempt) {
        try {
            in_flight_slots_.acquire();
            backend_calls_.fetch_add(1);
            std::int64_t start = now_ms();
            std::string text;
            try {
                text = backend_->complete(request);
            } catch (...) {
                in_flight_slots_.release();
                throw;
            }
            in_flight_slots_.release();
            return {text, backend_->name(), false, now_ms() - start};
        } catch (const BackendError& e) {
            if (!e.transient()) throw;
            if (attempt >= retry_.max_retries) {
                throw BackendError("retries exhausted after " + std::to_string(attempt + 1) +
                                       " attempts; last cause: " + e.what(),
                                   false, e.status());
            }
            retries_.fetch_add(1);
            sleep_fn_(jittered_delay(attempt));
        }
    }
}

LlmResponse LlmClient::complete(const LlmRequest& request) {
    if (request.prompt.empty()) throw ValidationError("llm request prompt is empty");
    const std::string key = cache_key(request);

    if (auto hit = read_cache_entry(cache_dir_, key)) {
        cache_hits_.fetch_add(1);
        return *hit;
    }

    std::shared_ptr<Flight> flight;
    std::shared_ptr<std::promise<LlmResponse>> promise;
    {
        std::lock_guard lock(mutex_);
        auto it = flights_.find(key);
        if (it != flights_.end()) {
            flight = it->second;
        } else {
            promise = std::make_shared<std::promise<LlmResponse>>();
            auto entry = std::make_shared<Flight>();
            entry->future = promise->get_future().share();
            flights_.emplace(key, entry);
        }
    }
    if (flight) return flight->future.get();  // follow the leader

    try {
        // The leader re-checks the cache: a previous flight may have landed
        // between our miss and our registration.
        LlmResponse response;
        if (auto hit = read_cache_entry(cache_dir_, key)) {
            cache_hits_.fetch_add(1);
            response = *hit;
        } else {
            response = call_backend(request);
            write_cache_entry(cache_dir_, key, request, response);
        }
        promise->set_value(response);
        std::lock_guard lock(mutex_);
        flights_.erase(key);
        return response;
    } catch (...) {
        promise->set_exception(std::current_exception());  // errors are never cached
        std::lock_guard lock(mutex_);
        flights_.erase(key);
        throw;
    }
}

CacheStats cache_inspect(const std::filesystem::path& cache_dir) {
    CacheStats stats;
    std::error_code ec;
    if (!std::filesystem::is_directory(cache_dir, ec)) return stats;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        ++stats.entries;
        stats.bytes += entry.file_size(ec);
        stats.keys.push_back(entry.path().stem().string());
    }
    std::sort(stats.keys.begin(), stats.keys.end());
    return stats;
}

std::size_t cache_clear(const std::filesystem::path& cache_dir) {
    std::size_t removed = 0;
    std::error_code ec;
    if (!std::filesystem::is_directory(cache_dir, ec)) return removed;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        std::filesystem::remove(entry.path(), ec);
        if (!ec) ++removed;
    }
    return removed;
}

}  // namespace chronoweave
