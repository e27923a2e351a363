#include "chronoweave/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "chronoweave/errors.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

namespace {

bool is_term_char(unsigned char c) {
    // Bytes >= 0x80 stay inside terms so multi-byte characters survive intact.
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::set<std::string> term_set(const NewsArticle& article) {
    std::set<std::string> terms;
    for (auto& t : tokenize(article.title)) terms.insert(std::move(t));
    auto body_terms = tokenize(article.body);
    std::size_t limit = std::min<std::size_t>(body_terms.size(), 50);
    for (std::size_t i = 0; i < limit; ++i) terms.insert(std::move(body_terms[i]));
    return terms;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;  // identical (empty) term sets
    std::size_t intersection = 0;
    for (const auto& t : a) {
        if (b.count(t) != 0) ++intersection;
    }
    std::size_t unions = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unions);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> terms;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_term_char(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && is_term_char(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            std::string term = to_lower_ascii(text.substr(start, i - start));
            if (utf8_length(term) >= 2) terms.push_back(std::move(term));
        }
    }
    return terms;
}

double score_candidate(const NewsArticle& target, const NewsArticle& candidate, const RetrievalParams& params) {
    if (candidate.published_at > target.published_at) {
        throw OrderingError("candidate " + candidate.id + " is published after target " + target.id);
    }
    double j = jaccard(term_set(target), term_set(candidate));
    std::int64_t delta_days = (target.published_at - candidate.published_at) / 86400;
    double decay = std::exp(-static_cast<double>(delta_days) / params.halflife_days);
    return 0.7 * j + 0.3 * decay;
}

CandidateSet select_candidates(const NewsArticle& target, std::span<const NewsArticle> corpus,
                               const RetrievalParams& params) {
    bool target_present = false;
    for (const auto& article : corpus) {
        if (article.id == target.id) {
            target_present = true;
            break;
        }
    }
    if (!target_present) throw LookupError("target id " + target.id + " not found in corpus");

    UtcSeconds window_start = target.published_at - static_cast<std::int64_t>(params.window_days) * 86400;

    CandidateSet set;
    set.target_id = target.id;
    for (const auto& article : corpus) {
        if (article.id == target.id) continue;
        if (article.published_at < window_start || article.published_at > target.published_at) continue;
        set.entries.push_back({article.id, score_candidate(target, article, params)});
    }
    std::sort(set.entries.begin(), set.entries.end(), [](const CandidateEntry& a, const CandidateEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.article_id < b.article_id;
    });
    if (set.entries.size() > static_cast<std::size_t>(params.max_candidates)) {
        set.entries.resize(static_cast<std::size_t>(params.max_candidates));
    }
    return set;
}

}  // namespace chronoweave
