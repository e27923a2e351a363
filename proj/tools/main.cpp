// chronoweave CLI: thin front-end over the C API in chronoweave.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronoweave.h"

using nlohmann::json;

namespace {

struct SessionGuard {
    cw_session* session = nullptr;
    SessionGuard() : session(cw_session_new()) {}
    ~SessionGuard() { cw_session_free(session); }
    SessionGuard(const SessionGuard&) = delete;
    SessionGuard& operator=(const SessionGuard&) = delete;
};

int fail(cw_session* session, cw_status status) {
    std::cerr << "error: " << cw_session_last_error(session) << "\n";
    return static_cast<int>(status);
}

int apply_overlay(cw_session* session, const json& config) {
    cw_status status = cw_session_set_config(session, config.dump().c_str());
    if (status != CW_OK) return fail(session, status);
    return 0;
}

int apply_config_file(cw_session* session, const std::string& path) {
    if (path.empty()) return 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config file: " << path << "\n";
        return static_cast<int>(CW_ERROR_INPUT);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    cw_status status = cw_session_set_config(session, buf.str().c_str());
    if (status != CW_OK) return fail(session, status);
    return 0;
}

json run_to_json(cw_session* session, cw_status (*command)(cw_session*, char**), int& exit_code) {
    char* summary_raw = nullptr;
    cw_status status = command(session, &summary_raw);
    if (status != CW_OK) {
        exit_code = fail(session, status);
        return json();
    }
    json summary = json::parse(summary_raw);
    cw_string_free(summary_raw);
    exit_code = 0;
    return summary;
}

void print_report_row(const json& report) {
    std::printf("%-9s %5lld %5lld %5lld %5lld   %8.4f %8.4f %8.4f %9.4f %15.4f\n",
                report["variant"].get<std::string>().c_str(), report["tp"].get<long long>(),
                report["fp"].get<long long>(), report["fn"].get<long long>(), report["tn"].get<long long>(),
                report["precision"].get<double>(), report["recall"].get<double>(), report["f1"].get<double>(),
                report["coverage"].get<double>(), report["parser_failure_rate"].get<double>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chronoweave: LLM-judged news background timelines"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may follow the subcommand

    std::string config_path;
    std::string backend;
    std::string cache_dir;
    std::string out_path;
    std::string variant;
    app.add_option("--config", config_path, "JSON config file; flags override its keys");
    app.add_option("--backend", backend, "Backend: live or mock")->check(CLI::IsMember({"live", "mock"}));
    app.add_option("--cache-dir", cache_dir, "Response cache directory (default ./.cache)");
    app.add_option("--out", out_path, "Output path (base path for timeline/eval)");
    app.add_option("--variant", variant, "Prompt variant: baseline or extended")
        ->check(CLI::IsMember({"baseline", "extended"}));

    std::string corpus;
    std::string target;
    std::string template_path;
    std::string now;
    std::string order;
    std::string model;
    std::string base_url;
    std::vector<std::string> formats;
    int window_days = 0, max_candidates = 0, budget_tokens = 0, timeout_ms = 0, max_in_flight = 0;
    double halflife_days = 0.0;
    bool fetch = false;

    auto add_corpus_target = [&](CLI::App* cmd, bool need_target) {
        cmd->add_option("--corpus", corpus, "JSON-lines corpus file")->required();
        auto* opt = cmd->add_option("--target", target, "Target article id or url");
        if (need_target) opt->required();
    };
    auto add_retrieval = [&](CLI::App* cmd) {
        cmd->add_option("--window-days", window_days, "Candidate window before the target date");
        cmd->add_option("--max-candidates", max_candidates, "Maximum candidates to score");
        cmd->add_option("--halflife-days", halflife_days, "Time-decay halflife in days");
    };
    auto add_prompting = [&](CLI::App* cmd) {
        cmd->add_option("--template", template_path, "Prompt template file (default: built-in)");
        cmd->add_option("--budget-tokens", budget_tokens, "Token budget per prompt (default 3000)");
        cmd->add_option("--model", model, "Backend model name");
        cmd->add_option("--base-url", base_url, "Live backend endpoint URL");
        cmd->add_option("--timeout-ms", timeout_ms, "Backend timeout");
        cmd->add_option("--max-in-flight", max_in_flight, "Concurrent backend call cap (default 4)");
        cmd->add_option("--now", now, "Fixed ISO timestamp for generated_at");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "Load, normalize and rewrite a corpus");
    add_corpus_target(ingest, false);
    ingest->add_flag("--fetch", fetch, "Fetch and extract bodies for articles without one");
    ingest->add_option("--now", now, "Fixed ISO timestamp for fetched_at");

    CLI::App* candidates = app.add_subcommand("candidates", "Score and list context candidates for a target");
    add_corpus_target(candidates, true);
    add_retrieval(candidates);

    CLI::App* timeline = app.add_subcommand("timeline", "Run the full pipeline and export the timeline");
    add_corpus_target(timeline, true);
    add_retrieval(timeline);
    add_prompting(timeline);
    timeline->add_option("--order", order, "Presentation order for markdown/html")
        ->check(CLI::IsMember({"asc", "desc"}));
    timeline->add_option("--format", formats, "Export formats (json, markdown, html); default all");

    CLI::App* eval = app.add_subcommand("eval", "Score both variants against gold labels");
    add_corpus_target(eval, true);
    add_retrieval(eval);
    add_prompting(eval);
    std::string gold, emit_mock_gold, judgments_baseline, judgments_extended;
    eval->add_option("--gold", gold, "Gold labels JSON-lines file");
    eval->add_option("--emit-mock-gold", emit_mock_gold, "Synthesize gold via the mock rule into this file");
    eval->add_option("--judgments-baseline", judgments_baseline, "Reuse baseline judgments from this file");
    eval->add_option("--judgments-extended", judgments_extended, "Reuse extended judgments from this file");

    CLI::App* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
    cache->require_subcommand(1);
    CLI::App* cache_inspect = cache->add_subcommand("inspect", "Show cache entry count and keys");
    CLI::App* cache_clear = cache->add_subcommand("clear", "Delete all cache entries");

    CLI11_PARSE(app, argc, argv);

    SessionGuard guard;
    if (guard.session == nullptr) {
        std::cerr << "error: out of memory\n";
        return static_cast<int>(CW_ERROR);
    }
    cw_session* session = guard.session;

    if (int rc = apply_config_file(session, config_path); rc != 0) return rc;

    // Overlay only the flags that were actually given.
    json overlay = json::object();
    if (!backend.empty()) overlay["backend"]["kind"] = backend;
    if (!cache_dir.empty()) overlay["cache_dir"] = cache_dir;
    if (!out_path.empty()) overlay["out"] = out_path;
    if (!variant.empty()) overlay["variant"] = variant;
    if (!corpus.empty()) overlay["corpus"] = corpus;
    if (!target.empty()) overlay["target"] = target;
    if (!template_path.empty()) overlay["template"] = template_path;
    if (!now.empty()) overlay["now"] = now;
    if (!order.empty()) overlay["order"] = order;
    if (!model.empty()) overlay["backend"]["model"] = model;
    if (!base_url.empty()) overlay["backend"]["base_url"] = base_url;
    if (!formats.empty()) overlay["formats"] = formats;
    if (window_days > 0) overlay["retrieval"]["window_days"] = window_days;
    if (max_candidates > 0) overlay["retrieval"]["max_candidates"] = max_candidates;
    if (halflife_days > 0.0) overlay["retrieval"]["halflife_days"] = halflife_days;
    if (budget_tokens > 0) overlay["budget_tokens"] = budget_tokens;
    if (timeout_ms > 0) overlay["backend"]["timeout_ms"] = timeout_ms;
    if (max_in_flight > 0) overlay["backend"]["max_in_flight"] = max_in_flight;
    if (fetch) overlay["fetch"] = true;
    if (!gold.empty()) overlay["gold"] = gold;
    if (!emit_mock_gold.empty()) overlay["emit_mock_gold"] = emit_mock_gold;
    if (!judgments_baseline.empty()) overlay["judgments_baseline"] = judgments_baseline;
    if (!judgments_extended.empty()) overlay["judgments_extended"] = judgments_extended;
    if (int rc = apply_overlay(session, overlay); rc != 0) return rc;

    int exit_code = 0;
    if (ingest->parsed()) {
        json summary = run_to_json(session, cw_run_ingest, exit_code);
        if (exit_code != 0) return exit_code;
        std::cout << summary["loaded"].get<std::size_t>() << " loaded, "
                  << summary["duplicates_dropped"].get<std::size_t>() << " duplicates";
        if (summary["fetched"].get<std::size_t>() > 0) std::cout << ", " << summary["fetched"] << " fetched";
        std::cout << "\nwrote " << summary["corpus_out"].get<std::string>() << "\n";
        std::cout << "wrote " << summary["diagnostics_out"].get<std::string>() << "\n";
    } else if (candidates->parsed()) {
        json summary = run_to_json(session, cw_run_candidates, exit_code);
        if (exit_code != 0) return exit_code;
        std::cout << "target " << summary["target_id"].get<std::string>() << ": "
                  << summary["entries"].size() << " candidates\n";
        for (const auto& entry : summary["entries"]) {
            std::printf("  %.4f  %s  %s\n", entry["score"].get<double>(),
                        entry["article_id"].get<std::string>().c_str(), entry["title"].get<std::string>().c_str());
        }
        if (!summary["out"].get<std::string>().empty()) {
            std::cout << "wrote " << summary["out"].get<std::string>() << "\n";
        }
    } else if (timeline->parsed()) {
        json summary = run_to_json(session, cw_run_timeline, exit_code);
        if (exit_code != 0) return exit_code;
        std::cout << summary["entries"].get<std::size_t>() << " timeline entries from "
                  << summary["judgments"].get<std::size_t>() << " judgments in "
                  << summary["bundles"].get<std::size_t>() << " bundle(s)\n";
        std::cout << "backend calls: " << summary["backend_calls"] << ", cache hits: " << summary["cache_hits"]
                  << ", retries: " << summary["retries"] << "\n";
        std::cout << "diagnostics: " << summary["unparsed_lines"] << " unparsed, " << summary["missing_indices"]
                  << " missing, " << summary["duplicate_indices"] << " duplicate, "
                  << summary["citation_violations"] << " citation violations\n";
        for (const auto& path : summary["written"]) std::cout << "wrote " << path.get<std::string>() << "\n";
    } else if (eval->parsed()) {
        json summary = run_to_json(session, cw_run_eval, exit_code);
        if (exit_code != 0) return exit_code;
        std::cout << "gold pairs: " << summary["gold_pairs"] << " (" << summary["gold_path"].get<std::string>()
                  << ")\n\n";
        std::printf("%-9s %5s %5s %5s %5s   %8s %8s %8s %9s %15s\n", "variant", "tp", "fp", "fn", "tn",
                    "precision", "recall", "f1", "coverage", "parser_failure");
        print_report_row(summary["baseline"]);
        print_report_row(summary["extended"]);
        const json& cmp = summary["comparison"];
        std::printf("\ndelta (extended - baseline): precision %+.4f, recall %+.4f, f1 %+.4f\n",
                    cmp["delta_precision"].get<double>(), cmp["delta_recall"].get<double>(),
                    cmp["delta_f1"].get<double>());
        std::printf("discordant pairs: baseline-only %lld, extended-only %lld; McNemar exact p = %.6f\n",
                    cmp["baseline_only_correct"].get<long long>(), cmp["extended_only_correct"].get<long long>(),
                    cmp["mcnemar_p"].get<double>());
        for (const auto& path : summary["written"]) std::cout << "wrote " << path.get<std::string>() << "\n";
    } else if (cache_inspect->parsed()) {
        json summary = run_to_json(session, cw_cache_inspect, exit_code);
        if (exit_code != 0) return exit_code;
        std::cout << summary["entries"].get<std::size_t>() << " entries, " << summary["bytes"].get<std::uintmax_t>()
                  << " bytes in " << summary["cache_dir"].get<std::string>() << "\n";
        for (const auto& key : summary["keys"]) std::cout << "  " << key.get<std::string>() << "\n";
    } else if (cache_clear->parsed()) {
        json summary = run_to_json(session, cw_cache_clear, exit_code);
        if (exit_code != 0) return exit_code;
        std::cout << "removed " << summary["removed"].get<std::size_t>() << " entries from "
                  << summary["cache_dir"].get<std::string>() << "\n";
    }
    return exit_code;
}
