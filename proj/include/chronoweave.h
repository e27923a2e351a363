/* chronoweave.h - C API of the chronoweave news-timeline pipeline.
 *
 * All functionality sits behind an opaque session handle. A session collects
 * configuration as JSON objects (later objects override earlier keys) and
 * runs pipeline commands against it. Every command returns a cw_status; on
 * failure cw_session_last_error() describes what went wrong, on success the
 * out parameter (when present) receives a malloc'd JSON summary that the
 * caller releases with cw_string_free().
 */
#ifndef CHRONOWEAVE_H
#define CHRONOWEAVE_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the numeric values double as CLI exit codes. */
typedef enum cw_status {
    CW_OK = 0,
    CW_ERROR = 1,         /* internal faults, unwritable outputs */
    CW_ERROR_INPUT = 2,   /* unreadable or malformed inputs, bad config */
    CW_ERROR_BACKEND = 3, /* network failures, exhausted retries */
    CW_ERROR_EVAL = 4     /* evaluation consistency problems */
} cw_status;

typedef struct cw_session cw_session;

const char* cw_version(void);

cw_session* cw_session_new(void);
void cw_session_free(cw_session* session);

/* Overlays a JSON config object onto the session's configuration.
 * Recognized keys: corpus, target, retrieval{window_days, max_candidates,
 * halflife_days}, variant, template, backend{kind, base_url, model,
 * temperature, max_output_tokens, timeout_ms, max_in_flight}, budget_tokens,
 * cache_dir, out, order, formats, now, fetch, gold, emit_mock_gold,
 * judgments_baseline, judgments_extended. */
cw_status cw_session_set_config(cw_session* session, const char* config_json);

/* Message of the last failed call on this session; empty string if none. */
const char* cw_session_last_error(const cw_session* session);

/* Pipeline commands. Summaries are JSON objects (see README for schemas). */
cw_status cw_run_ingest(cw_session* session, char** summary_json);
cw_status cw_run_candidates(cw_session* session, char** summary_json);
cw_status cw_run_timeline(cw_session* session, char** summary_json);
cw_status cw_run_eval(cw_session* session, char** summary_json);

/* Response-cache maintenance for the configured cache_dir. */
cw_status cw_cache_inspect(cw_session* session, char** summary_json);
cw_status cw_cache_clear(cw_session* session, char** summary_json);

void cw_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CHRONOWEAVE_H */
