#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chronoweave/prompting.hpp"

namespace chronoweave {

enum class Label {
    Relevant,
    Irrelevant,
};

std::string_view label_name(Label label);                       // "relevant" / "irrelevant"
std::optional<Label> label_from_name(std::string_view name);    // case-insensitive

struct RelevanceJudgment {
    std::string target_id;
    std::string context_id;
    Label label = Label::Irrelevant;
    std::optional<std::string> rationale;
    int source_index = 0;  // 1-based inside the bundle
    std::string bundle_id;

    friend bool operator==(const RelevanceJudgment&, const RelevanceJudgment&) = default;
};

struct BackgroundStory {
    std::string target_id;
    std::string text;  // non-empty
    std::set<int> cited_indices;
    std::string bundle_id;

    friend bool operator==(const BackgroundStory&, const BackgroundStory&) = default;
};

struct ParseDiagnostics {
    std::vector<std::pair<int, std::string>> unparsed_lines;  // (1-based line no, text)
    std::set<int> missing_indices;
    std::set<int> duplicate_indices;
    std::set<int> citation_violations;

    bool clean() const {
        return unparsed_lines.empty() && missing_indices.empty() && duplicate_indices.empty() &&
               citation_violations.empty();
    }
};

struct JudgmentParse {
    std::vector<RelevanceJudgment> judgments;  // exactly one per bundle snippet
    ParseDiagnostics diagnostics;
};

// Scans the region before any story marker for lines of the form
// "<index> <sep> <LABEL> [<sep> rationale]" with <sep> in {. ) : -} and a
// case-insensitive RELEVANT/IRRELEVANT label. Total over arbitrary input:
// never throws, and every snippet index ends up with exactly one judgment —
// unaccounted indices are materialized as Irrelevant with rationale
// "unparsed-default" and recorded in the diagnostics.
JudgmentParse parse_judgments(std::string_view response_text, const PromptBundle& bundle);

// Returns the story after a line equal to "Background Story:", or nullopt
// when no marker exists. Cited indices are every integer k written as "[k]".
// Throws StoryError when the marker is present but the body is empty.
std::optional<BackgroundStory> parse_story(std::string_view response_text, const PromptBundle& bundle);

// citation_violations = cited indices minus the Relevant index set. Throws
// ConsistencyError when story and judgments carry different bundle ids.
ParseDiagnostics validate_story_citations(const BackgroundStory& story,
                                          std::span<const RelevanceJudgment> judgments);

}  // namespace chronoweave
