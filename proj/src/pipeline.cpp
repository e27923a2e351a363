#include "chronoweave/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "chronoweave/errors.hpp"
#include "chronoweave/fetch.hpp"
#include "chronoweave/fsio.hpp"
#include "chronoweave/html_extract.hpp"
#include "chronoweave/prompting.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

using nlohmann::json;

namespace {

UtcSeconds wall_clock_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void validate(const RunConfig& config) {
    if (config.retrieval.window_days < 1) throw InputError("retrieval.window_days must be >= 1");
    if (config.retrieval.max_candidates < 1) throw InputError("retrieval.max_candidates must be >= 1");
    if (!(config.retrieval.halflife_days > 0.0)) throw InputError("retrieval.halflife_days must be > 0");
    if (config.budget_tokens < 1) throw InputError("budget_tokens must be >= 1");
    if (config.max_in_flight < 1) throw InputError("backend.max_in_flight must be >= 1");
    if (config.temperature < 0.0) throw InputError("backend.temperature must be >= 0");
    if (config.max_output_tokens < 1) throw InputError("backend.max_output_tokens must be >= 1");
    for (const auto& format : config.formats) {
        if (format != "json" && format != "markdown" && format != "html") {
            throw InputError("unknown export format \"" + format + "\"");
        }
    }
}

const NewsArticle& find_target(const std::vector<NewsArticle>& corpus, const std::string& selector) {
    if (selector.empty()) throw InputError("no target article selected");
    for (const auto& article : corpus) {
        if (article.id == selector) return article;
    }
    for (const auto& article : corpus) {
        if (article.url == selector) return article;
    }
    throw LookupError("target \"" + selector + "\" matches no corpus article by id or url");
}

PromptTemplate resolve_template(const RunConfig& config) {
    if (config.template_path.empty()) return default_template();
    return load_template(config.template_path);
}

std::shared_ptr<LlmBackend> make_backend(const RunConfig& config) {
    if (config.backend == BackendKind::Mock) return std::make_shared<MockBackend>();
    if (config.base_url.empty()) throw InputError("live backend requires backend.base_url");
    HttpBackendConfig http;
    http.base_url = config.base_url;
    http.timeout_ms = config.timeout_ms;
    if (const char* key = std::getenv("CHRONOWEAVE_API_KEY")) http.api_key = key;
    return std::make_shared<HttpBackend>(std::move(http));
}

UtcSeconds resolve_generated_at(const RunConfig& config, const NewsArticle& target) {
    if (config.now) return parse_date_time(*config.now);
    // Mock runs are for reproducible offline work, so they get a clock that
    // is a pure function of the input.
    if (config.backend == BackendKind::Mock) return target.published_at;
    return wall_clock_now();
}

void ensure_parent_dir(const std::filesystem::path& path) {
    std::filesystem::path dir = path.parent_path();
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
}

struct BundleResult {
    PromptBundle bundle;
    LlmResponse response;
    JudgmentParse parse;
    std::optional<BackgroundStory> story;
};

struct PipelineContext {
    std::vector<NewsArticle> corpus;
    const NewsArticle* target = nullptr;
    CandidateSet candidates;
    std::vector<ContextSnippet> snippets;
    PromptTemplate tmpl;
};

PipelineContext prepare(const RunConfig& config) {
    validate(config);
    if (config.corpus_path.empty()) throw InputError("no corpus path configured");

    PipelineContext ctx;
    ctx.corpus = load_corpus(config.corpus_path);
    ctx.tmpl = resolve_template(config);
    ctx.target = &find_target(ctx.corpus, config.target);
    ctx.candidates = select_candidates(*ctx.target, ctx.corpus, config.retrieval);

    std::unordered_map<std::string, const NewsArticle*> by_id;
    for (const auto& article : ctx.corpus) by_id.emplace(article.id, &article);
    int index = 1;
    for (const auto& entry : ctx.candidates.entries) {
        ctx.snippets.push_back(make_snippet(*by_id.at(entry.article_id), index++));
    }
    return ctx;
}

struct VariantRun {
    std::vector<BundleResult> bundles;
    std::vector<RelevanceJudgment> judgments;
    std::optional<BackgroundStory> story;  // first bundle's story
    double parser_failure_rate = 0.0;
};

VariantRun run_variant(const PipelineContext& ctx, const RunConfig& config, PromptVariant variant,
                       LlmClient& client) {
    std::size_t overhead = prompt_overhead(*ctx.target, variant, ctx.tmpl);
    auto batches = chunk_candidates(ctx.snippets, config.budget_tokens, overhead);

    std::vector<PromptBundle> bundles;
    bundles.reserve(batches.size());
    for (auto& batch : batches) {
        bundles.push_back(render_prompt(*ctx.target, std::move(batch), variant, ctx.tmpl));
    }

    std::vector<std::future<LlmResponse>> futures;
    futures.reserve(bundles.size());
    for (const auto& bundle : bundles) {
        LlmRequest request;
        request.model = config.model;
        request.prompt = bundle.rendered;
        request.temperature = config.temperature;
        request.max_output_tokens = config.max_output_tokens;
        futures.push_back(std::async(std::launch::async,
                                     [&client, request = std::move(request)] { return client.complete(request); }));
    }

    VariantRun run;
    std::size_t defaulted = 0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        BundleResult result;
        result.response = futures[i].get();
        result.bundle = std::move(bundles[i]);
        result.parse = parse_judgments(result.response.text, result.bundle);
        result.story = parse_story(result.response.text, result.bundle);
        if (result.story) {
            auto violations = validate_story_citations(*result.story, result.parse.judgments);
            result.parse.diagnostics.citation_violations.insert(violations.citation_violations.begin(),
                                                                violations.citation_violations.end());
            if (!run.story) run.story = result.story;
        }
        for (const auto& judgment : result.parse.judgments) {
            if (judgment.rationale == "unparsed-default") ++defaulted;
            run.judgments.push_back(judgment);
        }
        run.bundles.push_back(std::move(result));
    }
    if (!run.judgments.empty()) {
        run.parser_failure_rate = static_cast<double>(defaulted) / static_cast<double>(run.judgments.size());
    }
    return run;
}

std::string diagnostics_to_json_line(const std::string& bundle_id, const ParseDiagnostics& diagnostics) {
    json obj;
    obj["bundle_id"] = bundle_id;
    json unparsed = json::array();
    for (const auto& [line_no, text] : diagnostics.unparsed_lines) {
        unparsed.push_back(json::array({line_no, text}));
    }
    obj["unparsed_lines"] = std::move(unparsed);
    obj["missing_indices"] = diagnostics.missing_indices;
    obj["duplicate_indices"] = diagnostics.duplicate_indices;
    obj["citation_violations"] = diagnostics.citation_violations;
    return obj.dump();
}

json report_to_json(const EvalReport& report) {
    json obj;
    obj["variant"] = variant_name(report.variant);
    obj["tp"] = report.tp;
    obj["fp"] = report.fp;
    obj["fn"] = report.fn;
    obj["tn"] = report.tn;
    obj["precision"] = report.precision;
    obj["recall"] = report.recall;
    obj["f1"] = report.f1;
    obj["coverage"] = report.coverage;
    obj["parser_failure_rate"] = report.parser_failure_rate;
    return obj;
}

json comparison_to_json(const ComparisonReport& comparison) {
    json obj;
    obj["delta_precision"] = comparison.delta_precision;
    obj["delta_recall"] = comparison.delta_recall;
    obj["delta_f1"] = comparison.delta_f1;
    obj["baseline_only_correct"] = comparison.baseline_only_correct;
    obj["extended_only_correct"] = comparison.extended_only_correct;
    obj["mcnemar_p"] = comparison.mcnemar_p;
    json disagreements = json::array();
    for (const auto& d : comparison.disagreements) {
        json row;
        row["target_id"] = d.target_id;
        row["context_id"] = d.context_id;
        row["baseline"] = std::string(label_name(d.baseline));
        row["extended"] = std::string(label_name(d.extended));
        row["gold"] = std::string(label_name(d.gold));
        disagreements.push_back(std::move(row));
    }
    obj["disagreements"] = std::move(disagreements);
    return obj;
}

}  // namespace

void apply_config_json(RunConfig& config, const std::string& json_text) {
    json obj = json::parse(json_text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw InputError("config is not a JSON object");
    try {
        if (obj.contains("corpus")) config.corpus_path = obj["corpus"].get<std::string>();
        if (obj.contains("target")) config.target = obj["target"].get<std::string>();
        if (obj.contains("retrieval")) {
            const json& r = obj["retrieval"];
            if (r.contains("window_days")) config.retrieval.window_days = r["window_days"].get<int>();
            if (r.contains("max_candidates")) config.retrieval.max_candidates = r["max_candidates"].get<int>();
            if (r.contains("halflife_days")) config.retrieval.halflife_days = r["halflife_days"].get<double>();
        }
        if (obj.contains("variant")) config.variant = variant_from_name(obj["variant"].get<std::string>());
        if (obj.contains("template")) config.template_path = obj["template"].get<std::string>();
        if (obj.contains("backend")) {
            const json& b = obj["backend"];
            if (b.contains("kind")) {
                std::string kind = b["kind"].get<std::string>();
                if (kind == "mock") config.backend = BackendKind::Mock;
                else if (kind == "live") config.backend = BackendKind::Live;
                else throw InputError("unknown backend kind \"" + kind + "\"");
            }
            if (b.contains("base_url")) config.base_url = b["base_url"].get<std::string>();
            if (b.contains("model")) config.model = b["model"].get<std::string>();
            if (b.contains("temperature")) config.temperature = b["temperature"].get<double>();
            if (b.contains("max_output_tokens")) config.max_output_tokens = b["max_output_tokens"].get<int>();
            if (b.contains("timeout_ms")) config.timeout_ms = b["timeout_ms"].get<int>();
            if (b.contains("max_in_flight")) config.max_in_flight = b["max_in_flight"].get<int>();
        }
        if (obj.contains("budget_tokens")) config.budget_tokens = obj["budget_tokens"].get<std::size_t>();
        if (obj.contains("cache_dir")) config.cache_dir = obj["cache_dir"].get<std::string>();
        if (obj.contains("out")) config.out_path = obj["out"].get<std::string>();
        if (obj.contains("order")) {
            std::string order = obj["order"].get<std::string>();
            if (order == "asc") config.order = EntryOrder::Ascending;
            else if (order == "desc") config.order = EntryOrder::Descending;
            else throw InputError("unknown order \"" + order + "\" (use asc or desc)");
        }
        if (obj.contains("formats")) config.formats = obj["formats"].get<std::vector<std::string>>();
        if (obj.contains("now")) config.now = obj["now"].get<std::string>();
        if (obj.contains("fetch")) config.fetch_missing_bodies = obj["fetch"].get<bool>();
        if (obj.contains("gold")) config.gold_path = obj["gold"].get<std::string>();
        if (obj.contains("emit_mock_gold")) config.emit_mock_gold = obj["emit_mock_gold"].get<std::string>();
        if (obj.contains("judgments_baseline")) {
            config.judgments_baseline_path = obj["judgments_baseline"].get<std::string>();
        }
        if (obj.contains("judgments_extended")) {
            config.judgments_extended_path = obj["judgments_extended"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
}

IngestSummary run_ingest(const RunConfig& config) {
    validate(config);
    if (config.corpus_path.empty()) throw InputError("no corpus path configured");

    CorpusDiagnostics diagnostics;
    std::vector<NewsArticle> corpus = load_corpus(config.corpus_path, &diagnostics);

    IngestSummary summary;
    if (config.fetch_missing_bodies) {
        FetchOptions options;
        options.timeout_ms = config.timeout_ms;
        UtcSeconds stamp = config.now ? parse_date_time(*config.now) : wall_clock_now();
        for (auto& article : corpus) {
            if (!article.body.empty()) continue;
            RawDocument raw = fetch_article(article.url, options);
            ExtractedText extracted = extract_main_text(raw);
            article.body = collapse_whitespace(strip_control_chars(extracted.body));
            article.fetched_at = std::max(stamp, article.published_at);
            ++summary.fetched;
        }
    }

    std::string out = config.out_path.empty() ? config.corpus_path + ".normalized.jsonl" : config.out_path;
    ensure_parent_dir(out);
    save_corpus(out, corpus);

    json diag;
    diag["loaded"] = diagnostics.loaded;
    diag["duplicates_dropped"] = diagnostics.duplicates_dropped;
    diag["duplicate_ids"] = diagnostics.duplicate_ids;
    std::string diag_out = out + ".diagnostics.json";
    atomic_write_file(diag_out, diag.dump(2) + "\n");

    summary.loaded = diagnostics.loaded;
    summary.duplicates_dropped = diagnostics.duplicates_dropped;
    summary.corpus_out = out;
    summary.diagnostics_out = diag_out;
    return summary;
}

CandidatesSummary run_candidates(const RunConfig& config) {
    PipelineContext ctx = prepare(config);

    CandidatesSummary summary;
    summary.candidates = ctx.candidates;
    std::unordered_map<std::string, const NewsArticle*> by_id;
    for (const auto& article : ctx.corpus) by_id.emplace(article.id, &article);
    for (const auto& entry : ctx.candidates.entries) {
        summary.titles.emplace_back(entry.article_id, by_id.at(entry.article_id)->title);
    }

    if (!config.out_path.empty()) {
        json obj;
        obj["target_id"] = ctx.candidates.target_id;
        json entries = json::array();
        for (const auto& entry : ctx.candidates.entries) {
            entries.push_back(json{{"article_id", entry.article_id}, {"score", entry.score}});
        }
        obj["entries"] = std::move(entries);
        ensure_parent_dir(config.out_path);
        atomic_write_file(config.out_path, obj.dump(2) + "\n");
        summary.out = config.out_path;
    }
    return summary;
}

TimelineSummary run_timeline(const RunConfig& config) {
    PipelineContext ctx = prepare(config);
    const std::string base = config.out_path.empty() ? "timeline" : config.out_path;
    ensure_parent_dir(base);

    LlmClient client(make_backend(config), config.cache_dir, RetryPolicy{}, config.max_in_flight);
    VariantRun run = run_variant(ctx, config, config.variant, client);

    Timeline timeline = assemble(*ctx.target, run.judgments, ctx.corpus, run.story, config.variant,
                                 resolve_generated_at(config, *ctx.target));

    TimelineSummary summary;
    for (const auto& format : config.formats) {
        if (format == "json") {
            export_timeline(timeline, ExportFormat::Json, base + ".json", config.order);
            summary.written.push_back(base + ".json");
        } else if (format == "markdown") {
            export_timeline(timeline, ExportFormat::Markdown, base + ".md", config.order);
            summary.written.push_back(base + ".md");
        } else {
            export_timeline(timeline, ExportFormat::Html, base + ".html", config.order);
            summary.written.push_back(base + ".html");
        }
    }

    std::ostringstream judgments_out;
    for (const auto& judgment : run.judgments) judgments_out << judgment_to_json_line(judgment) << '\n';
    atomic_write_file(base + ".judgments.jsonl", judgments_out.str());
    summary.written.push_back(base + ".judgments.jsonl");

    std::ostringstream diagnostics_out;
    for (const auto& result : run.bundles) {
        diagnostics_out << diagnostics_to_json_line(result.bundle.bundle_id, result.parse.diagnostics) << '\n';
        summary.unparsed_lines += result.parse.diagnostics.unparsed_lines.size();
        summary.missing_indices += result.parse.diagnostics.missing_indices.size();
        summary.duplicate_indices += result.parse.diagnostics.duplicate_indices.size();
        summary.citation_violations += result.parse.diagnostics.citation_violations.size();
    }
    atomic_write_file(base + ".diagnostics.jsonl", diagnostics_out.str());
    summary.written.push_back(base + ".diagnostics.jsonl");

    summary.entries = timeline.entries.size();
    summary.bundles = run.bundles.size();
    summary.judgments = run.judgments.size();
    summary.backend_calls = client.backend_calls();
    summary.cache_hits = client.cache_hits();
    summary.retries = client.retries();
    summary.parser_failure_rate = run.parser_failure_rate;
    return summary;
}

std::vector<RelevanceJudgment> load_judgments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EvalConsistencyError("cannot read judgments file: " + path.string());
    std::vector<RelevanceJudgment> judgments;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw EvalConsistencyError("judgments line " + std::to_string(line_no) + " is not a JSON object");
        }
        RelevanceJudgment judgment;
        try {
            judgment.target_id = obj.at("target_id").get<std::string>();
            judgment.context_id = obj.at("context_id").get<std::string>();
            auto label = label_from_name(obj.at("label").get<std::string>());
            if (!label) {
                throw EvalConsistencyError("judgments line " + std::to_string(line_no) + ": unknown label");
            }
            judgment.label = *label;
            if (obj.contains("rationale") && obj["rationale"].is_string()) {
                judgment.rationale = obj["rationale"].get<std::string>();
            }
            judgment.source_index = obj.value("source_index", 0);
            judgment.bundle_id = obj.value("bundle_id", std::string());
        } catch (const json::exception& e) {
            throw EvalConsistencyError("judgments line " + std::to_string(line_no) + ": " + e.what());
        }
        judgments.push_back(std::move(judgment));
    }
    return judgments;
}

std::string judgment_to_json_line(const RelevanceJudgment& judgment) {
    json obj;
    obj["target_id"] = judgment.target_id;
    obj["context_id"] = judgment.context_id;
    obj["label"] = std::string(label_name(judgment.label));
    if (judgment.rationale) obj["rationale"] = *judgment.rationale;
    obj["source_index"] = judgment.source_index;
    obj["bundle_id"] = judgment.bundle_id;
    return obj.dump();
}

EvalSummary run_eval(const RunConfig& config) {
    PipelineContext ctx = prepare(config);
    const std::string out_base = config.out_path.empty() ? "eval" : config.out_path;
    ensure_parent_dir(out_base);

    EvalSummary summary;

    std::vector<GoldLabel> gold;
    if (!config.emit_mock_gold.empty()) {
        std::unordered_map<std::string, const NewsArticle*> by_id;
        for (const auto& article : ctx.corpus) by_id.emplace(article.id, &article);
        for (const auto& entry : ctx.candidates.entries) {
            GoldLabel label;
            label.target_id = ctx.target->id;
            label.context_id = entry.article_id;
            label.label = mock_relevance_rule(ctx.target->title, by_id.at(entry.article_id)->title)
                              ? Label::Relevant
                              : Label::Irrelevant;
            gold.push_back(std::move(label));
        }
        ensure_parent_dir(config.emit_mock_gold);
        save_gold(config.emit_mock_gold, gold);
        summary.gold_path = config.emit_mock_gold;
        summary.written.push_back(config.emit_mock_gold);
    } else if (!config.gold_path.empty()) {
        gold = load_gold(config.gold_path);
        summary.gold_path = config.gold_path;
    } else {
        throw InputError("eval needs either a gold file or emit_mock_gold");
    }

    auto evaluate_variant = [&](PromptVariant variant, const std::string& judgments_path) -> VariantEval {
        std::vector<RelevanceJudgment> judgments;
        double parser_failure_rate = 0.0;
        if (!judgments_path.empty()) {
            judgments = load_judgments(judgments_path);
            std::size_t defaulted = 0;
            for (const auto& j : judgments) {
                if (j.rationale == "unparsed-default") ++defaulted;
            }
            if (!judgments.empty()) {
                parser_failure_rate = static_cast<double>(defaulted) / static_cast<double>(judgments.size());
            }
        } else {
            LlmClient client(make_backend(config), config.cache_dir, RetryPolicy{}, config.max_in_flight);
            VariantRun run = run_variant(ctx, config, variant, client);
            judgments = std::move(run.judgments);
            parser_failure_rate = run.parser_failure_rate;
            std::ostringstream out;
            for (const auto& judgment : judgments) out << judgment_to_json_line(judgment) << '\n';
            std::string path = out_base + "." + std::string(variant_name(variant)) + ".judgments.jsonl";
            atomic_write_file(path, out.str());
            summary.written.push_back(path);
        }
        VariantEval eval;
        eval.report = score(confusion(judgments, gold), variant, parser_failure_rate);
        eval.pairs = pair_outcomes(judgments, gold);
        return eval;
    };

    VariantEval baseline = evaluate_variant(PromptVariant::BaselineOnly, config.judgments_baseline_path);
    VariantEval extended = evaluate_variant(PromptVariant::ExtendedTask, config.judgments_extended_path);

    summary.baseline = baseline.report;
    summary.extended = extended.report;
    summary.comparison = compare_variants(baseline, extended);
    summary.gold_pairs = gold.size();

    json report;
    report["gold_pairs"] = summary.gold_pairs;
    report["gold_path"] = summary.gold_path;
    report["baseline"] = report_to_json(summary.baseline);
    report["extended"] = report_to_json(summary.extended);
    report["comparison"] = comparison_to_json(summary.comparison);
    std::string report_path = out_base + ".eval.json";
    atomic_write_file(report_path, report.dump(2) + "\n");
    summary.written.push_back(report_path);
    return summary;
}

}  // namespace chronoweave
