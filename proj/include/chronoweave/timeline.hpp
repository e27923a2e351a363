#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronoweave/corpus.hpp"
#include "chronoweave/parsing.hpp"

namespace chronoweave {

struct TimelineEntry {
    std::string article_id;
    std::string date;      // ISO date, UTC
    std::string headline;
    std::string excerpt;   // at most 60 words
    bool is_target = false;

    friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

// The end product: the target plus its relevant background articles in
// ascending date order (ties by article_id).
struct Timeline {
    std::string target_id;
    std::vector<TimelineEntry> entries;
    UtcSeconds generated_at = 0;
    PromptVariant variant = PromptVariant::BaselineOnly;
    std::optional<BackgroundStory> story;

    friend bool operator==(const Timeline&, const Timeline&) = default;
};

enum class ExportFormat { Json, Markdown, Html };
enum class EntryOrder { Ascending, Descending };

// Builds the timeline from the target plus every Relevant judgment,
// deduplicating same-date same-title entries (lower article_id survives).
// Throws LookupError for unresolvable context ids and ConflictError when one
// context id carries conflicting labels.
Timeline assemble(const NewsArticle& target, std::span<const RelevanceJudgment> judgments,
                  std::span<const NewsArticle> corpus, std::optional<BackgroundStory> story, PromptVariant variant,
                  UtcSeconds generated_at);

// All three renderings are byte-deterministic for equal inputs. The order
// flag is presentation only and applies to markdown/html; JSON always stores
// entries ascending so that it round-trips the Timeline value.
std::string timeline_to_json(const Timeline& timeline);
std::string timeline_to_markdown(const Timeline& timeline, EntryOrder order = EntryOrder::Ascending);
std::string timeline_to_html(const Timeline& timeline, EntryOrder order = EntryOrder::Ascending);

Timeline timeline_from_json(const std::string& text);

void export_timeline(const Timeline& timeline, ExportFormat format, const std::filesystem::path& path,
                     EntryOrder order = EntryOrder::Ascending);

}  // namespace chronoweave
