#include "chronoweave/parsing.hpp"

#include <algorithm>
#include <cctype>

#include "chronoweave/errors.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

std::string_view label_name(Label label) {
    return label == Label::Relevant ? "relevant" : "irrelevant";
}

std::optional<Label> label_from_name(std::string_view name) {
    std::string lowered = to_lower_ascii(name);
    if (lowered == "relevant") return Label::Relevant;
    if (lowered == "irrelevant") return Label::Irrelevant;
    return std::nullopt;
}

namespace {

bool is_separator(char c) {
    return c == '.' || c == ')' || c == ':' || c == '-';
}

struct LineScan {
    std::optional<int> index;       // present when a plausible "<int> <sep>" prefix exists
    std::optional<Label> label;
    std::optional<std::string> rationale;
    bool full_match = false;
};

LineScan scan_line(std::string_view line) {
    LineScan scan;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    };

    skip_ws();
    std::size_t digit_start = pos;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == digit_start || pos - digit_start > 9) return scan;
    int index = 0;
    for (std::size_t i = digit_start; i < pos; ++i) index = index * 10 + (line[i] - '0');

    skip_ws();
    if (pos >= line.size() || !is_separator(line[pos])) return scan;
    ++pos;
    scan.index = index;

    skip_ws();
    std::size_t word_start = pos;
    while (pos < line.size() && std::isalpha(static_cast<unsigned char>(line[pos]))) ++pos;
    auto label = label_from_name(line.substr(word_start, pos - word_start));
    if (!label) return scan;

    skip_ws();
    if (pos >= line.size()) {
        scan.label = label;
        scan.full_match = true;
        return scan;
    }
    if (!is_separator(line[pos])) return scan;  // rationale requires its own separator
    ++pos;
    std::string rationale = trim(line.substr(pos));
    scan.label = label;
    scan.full_match = true;
    if (!rationale.empty()) scan.rationale = rationale;
    return scan;
}

}  // namespace

JudgmentParse parse_judgments(std::string_view response_text, const PromptBundle& bundle) {
    JudgmentParse result;
    const int snippet_count = static_cast<int>(bundle.snippets.size());

    std::vector<std::optional<RelevanceJudgment>> by_index(static_cast<std::size_t>(snippet_count));
    std::vector<bool> mentioned(static_cast<std::size_t>(snippet_count), false);

    int line_no = 0;
    for (std::string_view line : split_lines(response_text)) {
        ++line_no;
        std::string trimmed = trim(line);
        if (trimmed == kStoryMarker) break;  // judgments never come from story text
        if (trimmed.empty()) continue;

        LineScan scan = scan_line(line);
        bool in_range = scan.index && *scan.index >= 1 && *scan.index <= snippet_count;
        if (scan.full_match && in_range) {
            std::size_t slot = static_cast<std::size_t>(*scan.index - 1);
            mentioned[slot] = true;
            if (by_index[slot]) {
                result.diagnostics.duplicate_indices.insert(*scan.index);  // first occurrence wins
                continue;
            }
            RelevanceJudgment judgment;
            judgment.target_id = bundle.target_id;
            judgment.context_id = bundle.snippets[slot].article_id;
            judgment.label = *scan.label;
            judgment.rationale = scan.rationale;
            judgment.source_index = *scan.index;
            judgment.bundle_id = bundle.bundle_id;
            by_index[slot] = std::move(judgment);
            continue;
        }
        if (in_range) mentioned[static_cast<std::size_t>(*scan.index - 1)] = true;
        result.diagnostics.unparsed_lines.emplace_back(line_no, std::string(line));
    }

    for (int index = 1; index <= snippet_count; ++index) {
        std::size_t slot = static_cast<std::size_t>(index - 1);
        if (!by_index[slot]) {
            if (!mentioned[slot]) result.diagnostics.missing_indices.insert(index);
            RelevanceJudgment judgment;
            judgment.target_id = bundle.target_id;
            judgment.context_id = bundle.snippets[slot].article_id;
            judgment.label = Label::Irrelevant;  // silence must not admit an article
            judgment.rationale = "unparsed-default";
            judgment.source_index = index;
            judgment.bundle_id = bundle.bundle_id;
            by_index[slot] = std::move(judgment);
        }
        result.judgments.push_back(std::move(*by_index[slot]));
    }
    return result;
}

std::optional<BackgroundStory> parse_story(std::string_view response_text, const PromptBundle& bundle) {
    auto lines = split_lines(response_text);
    std::size_t marker_line = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]) == kStoryMarker) {
            marker_line = i;
            break;
        }
    }
    if (marker_line == lines.size()) return std::nullopt;

    std::string body;
    for (std::size_t i = marker_line + 1; i < lines.size(); ++i) {
        if (!body.empty()) body.push_back('\n');
        body.append(lines[i]);
    }
    body = trim(body);
    if (body.empty()) throw StoryError("story marker present but the story body is empty");

    BackgroundStory story;
    story.target_id = bundle.target_id;
    story.bundle_id = bundle.bundle_id;
    story.text = body;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '[') continue;
        std::size_t j = i + 1;
        while (j < body.size() && std::isdigit(static_cast<unsigned char>(body[j]))) ++j;
        if (j > i + 1 && j - i - 1 <= 9 && j < body.size() && body[j] == ']') {
            story.cited_indices.insert(std::stoi(body.substr(i + 1, j - i - 1)));
            i = j;
        }
    }
    return story;
}

ParseDiagnostics validate_story_citations(const BackgroundStory& story,
                                          std::span<const RelevanceJudgment> judgments) {
    std::set<int> relevant;
    for (const auto& judgment : judgments) {
        if (judgment.bundle_id != story.bundle_id) {
            throw ConsistencyError("story bundle " + story.bundle_id + " does not match judgment bundle " +
                                   judgment.bundle_id);
        }
        if (judgment.label == Label::Relevant) relevant.insert(judgment.source_index);
    }
    ParseDiagnostics diagnostics;
    for (int cited : story.cited_indices) {
        if (relevant.count(cited) == 0) diagnostics.citation_violations.insert(cited);
    }
    return diagnostics;
}

}  // namespace chronoweave
