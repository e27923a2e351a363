#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronoweave/evaluation.hpp"
#include "chronoweave/llm.hpp"
#include "chronoweave/retrieval.hpp"
#include "chronoweave/timeline.hpp"

namespace chronoweave {

enum class BackendKind { Mock, Live };

// Everything a pipeline run needs, mirrored one-to-one by the JSON config
// accepted through --config and the C API.
struct RunConfig {
    std::string corpus_path;
    std::string target;  // article id or url
    RetrievalParams retrieval;
    PromptVariant variant = PromptVariant::ExtendedTask;
    std::string template_path;  // empty = built-in default template

    BackendKind backend = BackendKind::Mock;
    std::string base_url;
    std::string model = "mock-1";
    double temperature = 0.0;
    int max_output_tokens = 1024;
    int timeout_ms = 60000;
    int max_in_flight = 4;

    std::size_t budget_tokens = 3000;
    std::string cache_dir = ".cache";
    std::string out_path;  // per-command default when empty
    EntryOrder order = EntryOrder::Ascending;
    std::vector<std::string> formats = {"json", "markdown", "html"};
    std::optional<std::string> now;  // ISO override for generated/fetched stamps

    bool fetch_missing_bodies = false;  // ingest --fetch

    std::string gold_path;                // eval input
    std::string emit_mock_gold;           // eval: synthesize gold here first
    std::string judgments_baseline_path;  // eval: reuse judgments instead of running
    std::string judgments_extended_path;
};

// Parses/overlays a JSON config object onto an existing config. Unknown keys
// are ignored; wrong types throw InputError.
void apply_config_json(RunConfig& config, const std::string& json_text);

struct IngestSummary {
    std::size_t loaded = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t fetched = 0;
    std::string corpus_out;
    std::string diagnostics_out;
};

IngestSummary run_ingest(const RunConfig& config);

struct CandidatesSummary {
    CandidateSet candidates;
    std::vector<std::pair<std::string, std::string>> titles;  // (article_id, title) for display
    std::string out;                                          // written file, empty if stdout-only
};

CandidatesSummary run_candidates(const RunConfig& config);

struct TimelineSummary {
    std::size_t entries = 0;
    std::size_t bundles = 0;
    std::uint64_t backend_calls = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t retries = 0;
    std::size_t judgments = 0;
    std::size_t unparsed_lines = 0;
    std::size_t missing_indices = 0;
    std::size_t duplicate_indices = 0;
    std::size_t citation_violations = 0;
    double parser_failure_rate = 0.0;
    std::vector<std::string> written;
};

TimelineSummary run_timeline(const RunConfig& config);

struct EvalSummary {
    EvalReport baseline;
    EvalReport extended;
    ComparisonReport comparison;
    std::size_t gold_pairs = 0;
    std::string gold_path;
    std::vector<std::string> written;
};

EvalSummary run_eval(const RunConfig& config);

// Loads a judgments JSON-lines file; corruption surfaces as
// EvalConsistencyError because it breaks the evaluation contract.
std::vector<RelevanceJudgment> load_judgments(const std::filesystem::path& path);

std::string judgment_to_json_line(const RelevanceJudgment& judgment);

}  // namespace chronoweave
