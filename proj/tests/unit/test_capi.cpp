#include <doctest.h>

#include <json.hpp>

#include "chronoweave.h"
#include "chronoweave/corpus.hpp"
#include "support/helpers.hpp"

using nlohmann::json;
using cwtest::TempDir;

namespace {

// Tiny mock-friendly corpus: two context items share terms with the target.
const char* kCorpus =
    R"({"url":"https://n.example/a1","title":"chip export ban announced","published_at":"2023-10-01","body":"Officials announced the ban."})"
    "\n"
    R"({"url":"https://n.example/a2","title":"markets shrug off news","published_at":"2023-10-05","body":"Traders moved on."})"
    "\n"
    R"({"url":"https://n.example/a3","title":"chip export ban tightened","published_at":"2023-10-10","body":"The rules tightened."})"
    "\n"
    R"({"url":"https://n.example/t","title":"chip export ban widens","published_at":"2023-10-17","body":"The ban widened again."})"
    "\n";

struct Session {
    cw_session* handle = cw_session_new();
    ~Session() { cw_session_free(handle); }
};

json run(cw_session* session, cw_status (*command)(cw_session*, char**), cw_status expect = CW_OK) {
    char* out = nullptr;
    cw_status status = command(session, &out);
    REQUIRE(status == expect);
    if (status != CW_OK) {
        CHECK(std::string(cw_session_last_error(session)).size() > 0);
        return json();
    }
    REQUIRE(out != nullptr);
    json summary = json::parse(out);
    cw_string_free(out);
    return summary;
}

}  // namespace

TEST_CASE("cw_version reports something") {
    CHECK(std::string(cw_version()) == "0.1.0");
}

TEST_CASE("config parsing errors set last_error and return input status") {
    Session s;
    CHECK(cw_session_set_config(s.handle, "not json") == CW_ERROR_INPUT);
    CHECK(std::string(cw_session_last_error(s.handle)).find("config") != std::string::npos);
    CHECK(cw_session_set_config(s.handle, R"({"variant":"bogus"})") == CW_ERROR_INPUT);
    CHECK(cw_session_set_config(s.handle, R"({"variant":"baseline"})") == CW_OK);
    CHECK(std::string(cw_session_last_error(s.handle)).empty());
    CHECK(cw_session_set_config(nullptr, "{}") == CW_ERROR_INPUT);
    CHECK(cw_session_set_config(s.handle, nullptr) == CW_ERROR_INPUT);
}

TEST_CASE("timeline run through the C API produces files and a summary") {
    TempDir dir;
    cwtest::write_file(dir.file("corpus.jsonl"), kCorpus);

    Session s;
    json config = {
        {"corpus", dir.file("corpus.jsonl").string()},
        {"target", "https://n.example/t"},
        {"backend", {{"kind", "mock"}}},
        {"cache_dir", dir.file("cache").string()},
        {"out", dir.file("out/tl").string()},
    };
    REQUIRE(cw_session_set_config(s.handle, config.dump().c_str()) == CW_OK);

    json summary = run(s.handle, cw_run_timeline);
    CHECK(summary["entries"].get<int>() == 3);  // target + two relevant
    CHECK(summary["bundles"].get<int>() == 1);
    CHECK(summary["backend_calls"].get<int>() == 1);
    CHECK(summary["citation_violations"].get<int>() == 0);
    CHECK(summary["parser_failure_rate"].get<double>() == 0.0);
    for (const auto& path : summary["written"]) {
        CHECK(std::filesystem::exists(path.get<std::string>()));
    }

    // Second run hits the cache.
    json again = run(s.handle, cw_run_timeline);
    CHECK(again["backend_calls"].get<int>() == 0);
    CHECK(again["cache_hits"].get<int>() == 1);

    json cache = run(s.handle, cw_cache_inspect);
    CHECK(cache["entries"].get<int>() == 1);
    json cleared = run(s.handle, cw_cache_clear);
    CHECK(cleared["removed"].get<int>() == 1);
}

TEST_CASE("eval through the C API closes the mock loop") {
    TempDir dir;
    cwtest::write_file(dir.file("corpus.jsonl"), kCorpus);

    Session s;
    json config = {
        {"corpus", dir.file("corpus.jsonl").string()},
        {"target", "https://n.example/t"},
        {"backend", {{"kind", "mock"}}},
        {"cache_dir", dir.file("cache").string()},
        {"out", dir.file("out/ev").string()},
        {"emit_mock_gold", dir.file("out/gold.jsonl").string()},
    };
    REQUIRE(cw_session_set_config(s.handle, config.dump().c_str()) == CW_OK);

    json summary = run(s.handle, cw_run_eval);
    CHECK(summary["gold_pairs"].get<int>() == 3);
    for (const char* variant : {"baseline", "extended"}) {
        CHECK(summary[variant]["f1"].get<double>() == 1.0);
        CHECK(summary[variant]["coverage"].get<double>() == 1.0);
        CHECK(summary[variant]["parser_failure_rate"].get<double>() == 0.0);
    }
    CHECK(summary["comparison"]["delta_f1"].get<double>() == 0.0);
    CHECK(summary["comparison"]["mcnemar_p"].get<double>() == 1.0);
}

TEST_CASE("missing corpus maps to the input status code") {
    Session s;
    json config = {{"corpus", "/nonexistent/c.jsonl"}, {"target", "x"}, {"out", "/tmp/unused"}};
    REQUIRE(cw_session_set_config(s.handle, config.dump().c_str()) == CW_OK);
    char* out = nullptr;
    CHECK(cw_run_timeline(s.handle, &out) == CW_ERROR_INPUT);
    CHECK(out == nullptr);
    CHECK(std::string(cw_session_last_error(s.handle)).find("corpus") != std::string::npos);
}

TEST_CASE("ingest summary counts duplicates") {
    TempDir dir;
    std::string corpus(kCorpus);
    corpus += R"({"url":"https://n.example/a1","title":"chip export ban announced","published_at":"2023-10-01"})"
              "\n";
    cwtest::write_file(dir.file("corpus.jsonl"), corpus);

    Session s;
    json config = {{"corpus", dir.file("corpus.jsonl").string()}, {"out", dir.file("norm.jsonl").string()}};
    REQUIRE(cw_session_set_config(s.handle, config.dump().c_str()) == CW_OK);
    json summary = run(s.handle, cw_run_ingest);
    CHECK(summary["loaded"].get<int>() == 4);
    CHECK(summary["duplicates_dropped"].get<int>() == 1);
    CHECK(std::filesystem::exists(dir.file("norm.jsonl")));
    CHECK(std::filesystem::exists(summary["diagnostics_out"].get<std::string>()));
}

TEST_CASE("candidates through the C API are ranked") {
    TempDir dir;
    cwtest::write_file(dir.file("corpus.jsonl"), kCorpus);
    Session s;
    json config = {{"corpus", dir.file("corpus.jsonl").string()},
                   {"target", "https://n.example/t"},
                   {"out", dir.file("cand.json").string()}};
    REQUIRE(cw_session_set_config(s.handle, config.dump().c_str()) == CW_OK);
    json summary = run(s.handle, cw_run_candidates);
    REQUIRE(summary["entries"].size() == 3);
    double last = 1.0;
    for (const auto& entry : summary["entries"]) {
        CHECK(entry["score"].get<double>() <= last);
        last = entry["score"].get<double>();
    }
}
