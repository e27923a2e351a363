#include "chronoweave/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "chronoweave/errors.hpp"
#include "chronoweave/fsio.hpp"

namespace chronoweave {

using nlohmann::json;

std::vector<GoldLabel> load_gold(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read gold file: " + path.string(), ErrorCategory::Input);
    std::vector<GoldLabel> gold;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw ParseError("gold line " + std::to_string(line_no) + ": not a JSON object", line_no);
        }
        GoldLabel label;
        try {
            label.target_id = obj.at("target_id").get<std::string>();
            label.context_id = obj.at("context_id").get<std::string>();
            auto parsed = label_from_name(obj.at("label").get<std::string>());
            if (!parsed) throw ParseError("gold line " + std::to_string(line_no) + ": unknown label", line_no);
            label.label = *parsed;
        } catch (const json::exception& e) {
            throw ParseError("gold line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        gold.push_back(std::move(label));
    }
    return gold;
}

void save_gold(const std::filesystem::path& path, std::span<const GoldLabel> gold) {
    std::ostringstream out;
    for (const auto& g : gold) {
        json obj;
        obj["target_id"] = g.target_id;
        obj["context_id"] = g.context_id;
        obj["label"] = std::string(label_name(g.label));
        out << obj.dump() << '\n';
    }
    atomic_write_file(path, out.str());
}

namespace {

using PairKey = std::pair<std::string, std::string>;

std::map<PairKey, Label> judgment_map(std::span<const RelevanceJudgment> judgments) {
    std::map<PairKey, Label> map;
    for (const auto& judgment : judgments) {
        auto [it, inserted] = map.emplace(PairKey{judgment.target_id, judgment.context_id}, judgment.label);
        if (!inserted) {
            throw EvalConsistencyError("duplicate judgment for pair (" + judgment.target_id + ", " +
                                       judgment.context_id + ")");
        }
    }
    return map;
}

}  // namespace

ConfusionCounts confusion(std::span<const RelevanceJudgment> judgments, std::span<const GoldLabel> gold) {
    auto judged = judgment_map(judgments);

    ConfusionCounts counts;
    std::size_t joined = 0;
    for (const auto& g : gold) {
        auto it = judged.find(PairKey{g.target_id, g.context_id});
        if (it == judged.end()) continue;  // affects coverage, not the counts
        ++joined;
        bool judged_positive = it->second == Label::Relevant;
        bool gold_positive = g.label == Label::Relevant;
        if (judged_positive && gold_positive) ++counts.tp;
        else if (judged_positive && !gold_positive) ++counts.fp;
        else if (!judged_positive && gold_positive) ++counts.fn;
        else ++counts.tn;
    }
    counts.coverage = gold.empty() ? 1.0 : static_cast<double>(joined) / static_cast<double>(gold.size());
    return counts;
}

EvalReport score(const ConfusionCounts& counts, PromptVariant variant, double parser_failure_rate) {
    EvalReport report;
    report.variant = variant;
    report.tp = counts.tp;
    report.fp = counts.fp;
    report.fn = counts.fn;
    report.tn = counts.tn;
    report.coverage = counts.coverage;
    report.parser_failure_rate = parser_failure_rate;

    const double tp = static_cast<double>(counts.tp);
    report.precision = counts.tp + counts.fp == 0 ? 0.0 : tp / static_cast<double>(counts.tp + counts.fp);
    report.recall = counts.tp + counts.fn == 0 ? 0.0 : tp / static_cast<double>(counts.tp + counts.fn);
    const double pr = report.precision + report.recall;
    report.f1 = pr == 0.0 ? 0.0 : 2.0 * report.precision * report.recall / pr;
    return report;
}

std::vector<PairOutcome> pair_outcomes(std::span<const RelevanceJudgment> judgments,
                                       std::span<const GoldLabel> gold) {
    auto judged = judgment_map(judgments);

    std::vector<PairOutcome> outcomes;
    for (const auto& g : gold) {
        auto it = judged.find(PairKey{g.target_id, g.context_id});
        if (it == judged.end()) continue;
        PairOutcome outcome;
        outcome.target_id = g.target_id;
        outcome.context_id = g.context_id;
        outcome.judged = it->second;
        outcome.gold = g.label;
        outcome.correct = outcome.judged == outcome.gold;
        outcomes.push_back(std::move(outcome));
    }
    std::sort(outcomes.begin(), outcomes.end(), [](const PairOutcome& a, const PairOutcome& b) {
        if (a.target_id != b.target_id) return a.target_id < b.target_id;
        return a.context_id < b.context_id;
    });
    return outcomes;
}

double mcnemar_exact_p(std::int64_t b, std::int64_t c) {
    const std::int64_t n = b + c;
    if (n == 0) return 1.0;
    const std::int64_t m = std::min(b, c);
    // Sum C(n,k)/2^n for k = 0..m in log space.
    double tail = 0.0;
    const double log_half_n = static_cast<double>(n) * std::log(2.0);
    for (std::int64_t k = 0; k <= m; ++k) {
        double log_choose = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                            std::lgamma(static_cast<double>(n - k) + 1.0);
        tail += std::exp(log_choose - log_half_n);
    }
    return std::min(1.0, 2.0 * tail);
}

ComparisonReport compare_variants(const VariantEval& baseline, const VariantEval& extended) {
    if (baseline.pairs.size() != extended.pairs.size()) {
        throw EvalConsistencyError("variant evals cover different pair sets (" +
                                   std::to_string(baseline.pairs.size()) + " vs " +
                                   std::to_string(extended.pairs.size()) + " pairs)");
    }
    ComparisonReport report;
    for (std::size_t i = 0; i < baseline.pairs.size(); ++i) {
        const PairOutcome& b = baseline.pairs[i];
        const PairOutcome& e = extended.pairs[i];
        if (b.target_id != e.target_id || b.context_id != e.context_id || b.gold != e.gold) {
            throw EvalConsistencyError("variant evals cover different pair sets (mismatch at (" + b.target_id +
                                       ", " + b.context_id + "))");
        }
        if (b.correct && !e.correct) ++report.baseline_only_correct;
        if (!b.correct && e.correct) ++report.extended_only_correct;
        if (b.judged != e.judged) {
            report.disagreements.push_back({b.target_id, b.context_id, b.judged, e.judged, b.gold});
        }
    }
    report.delta_precision = extended.report.precision - baseline.report.precision;
    report.delta_recall = extended.report.recall - baseline.report.recall;
    report.delta_f1 = extended.report.f1 - baseline.report.f1;
    report.mcnemar_p = mcnemar_exact_p(report.baseline_only_correct, report.extended_only_correct);
    return report;
}

}  // namespace chronoweave
