#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoweave/corpus.hpp"

namespace chronoweave {

struct RetrievalParams {
    int window_days = 365;       // how far before the target candidates may be published
    int max_candidates = 20;
    double halflife_days = 30.0; // time-decay constant
};

struct CandidateEntry {
    std::string article_id;
    double score = 0.0;  // in [0, 1]

    friend bool operator==(const CandidateEntry&, const CandidateEntry&) = default;
};

// Scored context candidates for one target, sorted by score descending with
// ties broken by article_id ascending; never contains the target itself.
struct CandidateSet {
    std::string target_id;
    std::vector<CandidateEntry> entries;
};

// Lowercase terms split on non-alphanumeric runs; terms shorter than two
// characters are dropped, order and duplicates kept.
std::vector<std::string> tokenize(std::string_view text);

// 0.7 * Jaccard(title + first 50 body terms) + 0.3 * exp(-days / halflife).
// Requires candidate.published_at <= target.published_at (OrderingError).
double score_candidate(const NewsArticle& target, const NewsArticle& candidate, const RetrievalParams& params);

// Scores every corpus article published within the window ending at the
// target's date and keeps the top max_candidates. Throws LookupError when the
// target id is not a corpus member.
CandidateSet select_candidates(const NewsArticle& target, std::span<const NewsArticle> corpus,
                               const RetrievalParams& params);

}  // namespace chronoweave
