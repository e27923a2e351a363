#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chronoweave/parsing.hpp"

namespace chronoweave {

struct GoldLabel {
    std::string target_id;
    std::string context_id;
    Label label = Label::Irrelevant;

    friend bool operator==(const GoldLabel&, const GoldLabel&) = default;
};

// JSON-lines, keys target_id / context_id / label in {"relevant","irrelevant"}.
std::vector<GoldLabel> load_gold(const std::filesystem::path& path);
void save_gold(const std::filesystem::path& path, std::span<const GoldLabel> gold);

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
    double coverage = 1.0;  // fraction of gold pairs that received a judgment
};

// Joins on (target_id, context_id) with Relevant as the positive class. Gold
// pairs without a judgment lower coverage and stay out of the counts;
// judgments without gold are ignored. Duplicate judgments for one pair throw
// EvalConsistencyError.
ConfusionCounts confusion(std::span<const RelevanceJudgment> judgments, std::span<const GoldLabel> gold);

struct EvalReport {
    PromptVariant variant = PromptVariant::BaselineOnly;
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double coverage = 1.0;
    double parser_failure_rate = 0.0;
};

// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 their harmonic mean; each
// is 0 whenever its denominator is 0.
EvalReport score(const ConfusionCounts& counts, PromptVariant variant, double parser_failure_rate = 0.0);

// One joined (judgment, gold) pair with its correctness under one variant.
struct PairOutcome {
    std::string target_id;
    std::string context_id;
    Label judged = Label::Irrelevant;
    Label gold = Label::Irrelevant;
    bool correct = false;

    friend bool operator==(const PairOutcome&, const PairOutcome&) = default;
};

// Joined pairs sorted by (target_id, context_id); same join rules as
// confusion().
std::vector<PairOutcome> pair_outcomes(std::span<const RelevanceJudgment> judgments,
                                       std::span<const GoldLabel> gold);

struct VariantEval {
    EvalReport report;
    std::vector<PairOutcome> pairs;
};

struct Disagreement {
    std::string target_id;
    std::string context_id;
    Label baseline = Label::Irrelevant;
    Label extended = Label::Irrelevant;
    Label gold = Label::Irrelevant;
};

struct ComparisonReport {
    double delta_precision = 0.0;  // extended minus baseline
    double delta_recall = 0.0;
    double delta_f1 = 0.0;
    std::int64_t baseline_only_correct = 0;  // discordant count b
    std::int64_t extended_only_correct = 0;  // discordant count c
    double mcnemar_p = 1.0;
    std::vector<Disagreement> disagreements;
};

// Exact two-sided McNemar test: binomial sign test over the discordant
// pairs, p = min(1, 2 * P[X <= min(b,c)]) with X ~ Bin(b+c, 1/2).
double mcnemar_exact_p(std::int64_t b, std::int64_t c);

// Requires both evals to cover the same (target, context) pair set; a
// mismatch throws EvalConsistencyError.
ComparisonReport compare_variants(const VariantEval& baseline, const VariantEval& extended);

}  // namespace chronoweave
