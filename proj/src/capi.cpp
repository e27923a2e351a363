#include "chronoweave.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "chronoweave/errors.hpp"
#include "chronoweave/pipeline.hpp"

using nlohmann::json;

struct cw_session {
    chronoweave::RunConfig config;
    std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

cw_status status_of(const chronoweave::Error& e) {
    return static_cast<cw_status>(static_cast<int>(e.category()));
}

template <typename Fn>
cw_status guarded(cw_session* session, char** summary_json, Fn&& fn) {
    if (session == nullptr) return CW_ERROR_INPUT;
    if (summary_json != nullptr) *summary_json = nullptr;
    session->last_error.clear();
    try {
        json summary = fn();
        if (summary_json != nullptr) *summary_json = dup_string(summary.dump(2) + "\n");
        return CW_OK;
    } catch (const chronoweave::Error& e) {
        session->last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return CW_ERROR;
    } catch (...) {
        session->last_error = "unknown error";
        return CW_ERROR;
    }
}

json to_json(const chronoweave::EvalReport& report) {
    return json{{"variant", chronoweave::variant_name(report.variant)},
                {"tp", report.tp},
                {"fp", report.fp},
                {"fn", report.fn},
                {"tn", report.tn},
                {"precision", report.precision},
                {"recall", report.recall},
                {"f1", report.f1},
                {"coverage", report.coverage},
                {"parser_failure_rate", report.parser_failure_rate}};
}

}  // namespace

extern "C" {

const char* cw_version(void) {
    return "0.1.0";
}

cw_session* cw_session_new(void) {
    return new (std::nothrow) cw_session();
}

void cw_session_free(cw_session* session) {
    delete session;
}

cw_status cw_session_set_config(cw_session* session, const char* config_json) {
    if (session == nullptr || config_json == nullptr) return CW_ERROR_INPUT;
    session->last_error.clear();
    try {
        chronoweave::apply_config_json(session->config, config_json);
        return CW_OK;
    } catch (const chronoweave::Error& e) {
        session->last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return CW_ERROR;
    }
}

const char* cw_session_last_error(const cw_session* session) {
    if (session == nullptr) return "";
    return session->last_error.c_str();
}

cw_status cw_run_ingest(cw_session* session, char** summary_json) {
    return guarded(session, summary_json, [session] {
        chronoweave::IngestSummary summary = chronoweave::run_ingest(session->config);
        return json{{"loaded", summary.loaded},
                    {"duplicates_dropped", summary.duplicates_dropped},
                    {"fetched", summary.fetched},
                    {"corpus_out", summary.corpus_out},
                    {"diagnostics_out", summary.diagnostics_out}};
    });
}

cw_status cw_run_candidates(cw_session* session, char** summary_json) {
    return guarded(session, summary_json, [session] {
        chronoweave::CandidatesSummary summary = chronoweave::run_candidates(session->config);
        json entries = json::array();
        for (std::size_t i = 0; i < summary.candidates.entries.size(); ++i) {
            const auto& entry = summary.candidates.entries[i];
            entries.push_back(json{{"article_id", entry.article_id},
                                   {"score", entry.score},
                                   {"title", summary.titles[i].second}});
        }
        return json{{"target_id", summary.candidates.target_id},
                    {"entries", std::move(entries)},
                    {"out", summary.out}};
    });
}

cw_status cw_run_timeline(cw_session* session, char** summary_json) {
    return guarded(session, summary_json, [session] {
        chronoweave::TimelineSummary summary = chronoweave::run_timeline(session->config);
        return json{{"entries", summary.entries},
                    {"bundles", summary.bundles},
                    {"judgments", summary.judgments},
                    {"backend_calls", summary.backend_calls},
                    {"cache_hits", summary.cache_hits},
                    {"retries", summary.retries},
                    {"unparsed_lines", summary.unparsed_lines},
                    {"missing_indices", summary.missing_indices},
                    {"duplicate_indices", summary.duplicate_indices},
                    {"citation_violations", summary.citation_violations},
                    {"parser_failure_rate", summary.parser_failure_rate},
                    {"written", summary.written}};
    });
}

cw_status cw_run_eval(cw_session* session, char** summary_json) {
    return guarded(session, summary_json, [session] {
        chronoweave::EvalSummary summary = chronoweave::run_eval(session->config);
        json comparison{{"delta_precision", summary.comparison.delta_precision},
                        {"delta_recall", summary.comparison.delta_recall},
                        {"delta_f1", summary.comparison.delta_f1},
                        {"baseline_only_correct", summary.comparison.baseline_only_correct},
                        {"extended_only_correct", summary.comparison.extended_only_correct},
                        {"mcnemar_p", summary.comparison.mcnemar_p},
                        {"disagreements", summary.comparison.disagreements.size()}};
        return json{{"gold_pairs", summary.gold_pairs},
                    {"gold_path", summary.gold_path},
                    {"baseline", to_json(summary.baseline)},
                    {"extended", to_json(summary.extended)},
                    {"comparison", std::move(comparison)},
                    {"written", summary.written}};
    });
}

cw_status cw_cache_inspect(cw_session* session, char** summary_json) {
    return guarded(session, summary_json, [session] {
        chronoweave::CacheStats stats = chronoweave::cache_inspect(session->config.cache_dir);
        return json{{"cache_dir", session->config.cache_dir},
                    {"entries", stats.entries},
                    {"bytes", stats.bytes},
                    {"keys", stats.keys}};
    });
}

cw_status cw_cache_clear(cw_session* session, char** summary_json) {
    return guarded(session, summary_json, [session] {
        std::size_t removed = chronoweave::cache_clear(session->config.cache_dir);
        return json{{"cache_dir", session->config.cache_dir}, {"removed", removed}};
    });
}

void cw_string_free(char* s) {
    std::free(s);
}

}  // extern "C"
