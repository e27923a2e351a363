#include "chronoweave/timeline.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "chronoweave/errors.hpp"
#include "chronoweave/fsio.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

using nlohmann::json;

Timeline assemble(const NewsArticle& target, std::span<const RelevanceJudgment> judgments,
                  std::span<const NewsArticle> corpus, std::optional<BackgroundStory> story, PromptVariant variant,
                  UtcSeconds generated_at) {
    std::unordered_map<std::string, const NewsArticle*> by_id;
    for (const auto& article : corpus) by_id.emplace(article.id, &article);

    // One label per context id; conflicting labels across bundles indicate a
    // pipeline bug, not a vote.
    std::map<std::string, Label> labels;
    std::vector<std::string> conflicts;
    for (const auto& judgment : judgments) {
        auto [it, inserted] = labels.emplace(judgment.context_id, judgment.label);
        if (!inserted && it->second != judgment.label) conflicts.push_back(judgment.context_id);
    }
    if (!conflicts.empty()) {
        std::sort(conflicts.begin(), conflicts.end());
        conflicts.erase(std::unique(conflicts.begin(), conflicts.end()), conflicts.end());
        std::string joined;
        for (const auto& id : conflicts) {
            if (!joined.empty()) joined += ", ";
            joined += id;
        }
        throw ConflictError("conflicting relevance labels for context ids: " + joined);
    }

    auto to_entry = [](const NewsArticle& article, bool is_target) {
        TimelineEntry entry;
        entry.article_id = article.id;
        entry.date = format_iso_date(article.published_at);
        entry.headline = article.title;
        entry.excerpt = first_words(article.body, 60);
        entry.is_target = is_target;
        return entry;
    };

    Timeline timeline;
    timeline.target_id = target.id;
    timeline.generated_at = generated_at;
    timeline.variant = variant;
    timeline.story = std::move(story);

    TimelineEntry target_entry = to_entry(target, true);

    std::vector<TimelineEntry> context_entries;
    for (const auto& [context_id, label] : labels) {
        if (label != Label::Relevant) continue;
        if (context_id == target.id) continue;
        auto it = by_id.find(context_id);
        if (it == by_id.end()) throw LookupError("context id " + context_id + " not found in corpus");
        context_entries.push_back(to_entry(*it->second, false));
    }

    // Dedup: same date and same casefolded title collapse to the smaller
    // article_id; the target entry always survives.
    std::map<std::pair<std::string, std::string>, TimelineEntry> kept;
    auto key_of = [](const TimelineEntry& e) { return std::make_pair(e.date, casefold_key(e.headline)); };
    const auto target_key = key_of(target_entry);
    for (auto& entry : context_entries) {
        auto key = key_of(entry);
        if (key == target_key) continue;
        auto it = kept.find(key);
        if (it == kept.end()) {
            kept.emplace(std::move(key), std::move(entry));
        } else if (entry.article_id < it->second.article_id) {
            it->second = std::move(entry);
        }
    }

    timeline.entries.push_back(std::move(target_entry));
    for (auto& [key, entry] : kept) timeline.entries.push_back(std::move(entry));
    std::sort(timeline.entries.begin(), timeline.entries.end(), [](const TimelineEntry& a, const TimelineEntry& b) {
        if (a.date != b.date) return a.date < b.date;
        return a.article_id < b.article_id;
    });
    return timeline;
}

namespace {

json story_to_json(const BackgroundStory& story) {
    json obj;
    obj["target_id"] = story.target_id;
    obj["bundle_id"] = story.bundle_id;
    obj["text"] = story.text;
    obj["cited_indices"] = story.cited_indices;
    return obj;
}

std::vector<const TimelineEntry*> ordered_entries(const Timeline& timeline, EntryOrder order) {
    std::vector<const TimelineEntry*> entries;
    entries.reserve(timeline.entries.size());
    for (const auto& entry : timeline.entries) entries.push_back(&entry);
    if (order == EntryOrder::Descending) std::reverse(entries.begin(), entries.end());
    return entries;
}

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

const TimelineEntry* find_target_entry(const Timeline& timeline) {
    for (const auto& entry : timeline.entries) {
        if (entry.is_target) return &entry;
    }
    return nullptr;
}

}  // namespace

std::string timeline_to_json(const Timeline& timeline) {
    json obj;
    obj["version"] = "v1";
    obj["target_id"] = timeline.target_id;
    obj["variant"] = variant_name(timeline.variant);
    obj["generated_at"] = format_iso_date_time(timeline.generated_at);
    json entries = json::array();
    for (const auto& entry : timeline.entries) {
        json e;
        e["article_id"] = entry.article_id;
        e["date"] = entry.date;
        e["headline"] = entry.headline;
        e["excerpt"] = entry.excerpt;
        e["is_target"] = entry.is_target;
        entries.push_back(std::move(e));
    }
    obj["entries"] = std::move(entries);
    if (timeline.story) obj["story"] = story_to_json(*timeline.story);
    return obj.dump(2) + "\n";
}

Timeline timeline_from_json(const std::string& text) {
    json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError("timeline JSON is not an object");
    if (obj.value("version", "") != "v1") throw ParseError("unsupported timeline version");
    Timeline timeline;
    try {
        timeline.target_id = obj.at("target_id").get<std::string>();
        timeline.variant = variant_from_name(obj.at("variant").get<std::string>());
        timeline.generated_at = parse_date_time(obj.at("generated_at").get<std::string>());
        for (const auto& e : obj.at("entries")) {
            TimelineEntry entry;
            entry.article_id = e.at("article_id").get<std::string>();
            entry.date = e.at("date").get<std::string>();
            entry.headline = e.at("headline").get<std::string>();
            entry.excerpt = e.at("excerpt").get<std::string>();
            entry.is_target = e.at("is_target").get<bool>();
            timeline.entries.push_back(std::move(entry));
        }
        if (obj.contains("story")) {
            BackgroundStory story;
            const auto& s = obj.at("story");
            story.target_id = s.at("target_id").get<std::string>();
            story.bundle_id = s.at("bundle_id").get<std::string>();
            story.text = s.at("text").get<std::string>();
            for (const auto& k : s.at("cited_indices")) story.cited_indices.insert(k.get<int>());
            timeline.story = std::move(story);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed timeline JSON: ") + e.what());
    }
    return timeline;
}

std::string timeline_to_markdown(const Timeline& timeline, EntryOrder order) {
    const TimelineEntry* target = find_target_entry(timeline);
    std::string out = "# Timeline: ";
    out += target ? target->headline : timeline.target_id;
    out += "\n\n";
    for (const TimelineEntry* entry : ordered_entries(timeline, order)) {
        out += "- **" + entry->date + "** \xe2\x80\x94 " + entry->headline;
        if (entry->is_target) out += " *(target)*";
        out += "\n";
    }
    if (timeline.story) {
        out += "\n## Background\n\n";
        out += timeline.story->text;
        out += "\n";
    }
    return out;
}

std::string timeline_to_html(const Timeline& timeline, EntryOrder order) {
    const TimelineEntry* target = find_target_entry(timeline);
    std::string title = html_escape(target ? target->headline : timeline.target_id);

    std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    out += "<title>Timeline: " + title + "</title>\n";
    out += "<style>\n"
           "body { font-family: Georgia, serif; max-width: 46rem; margin: 2rem auto; color: #222; }\n"
           "li { margin: 0.6rem 0; }\n"
           "li.target { font-weight: bold; }\n"
           ".date { color: #666; font-variant-numeric: tabular-nums; margin-right: 0.5rem; }\n"
           ".excerpt { color: #444; font-size: 0.9em; display: block; }\n"
           "blockquote { border-left: 3px solid #999; padding-left: 1rem; color: #333; }\n"
           "</style>\n</head>\n<body>\n";
    out += "<h1>Timeline: " + title + "</h1>\n<ul>\n";
    for (const TimelineEntry* entry : ordered_entries(timeline, order)) {
        out += entry->is_target ? "<li class=\"target\">" : "<li>";
        out += "<span class=\"date\">" + html_escape(entry->date) + "</span>" + html_escape(entry->headline);
        if (!entry->excerpt.empty()) out += "<span class=\"excerpt\">" + html_escape(entry->excerpt) + "</span>";
        out += "</li>\n";
    }
    out += "</ul>\n";
    if (timeline.story) {
        out += "<h2>Background</h2>\n<blockquote>" + html_escape(timeline.story->text) + "</blockquote>\n";
    }
    out += "</body>\n</html>\n";
    return out;
}

void export_timeline(const Timeline& timeline, ExportFormat format, const std::filesystem::path& path,
                     EntryOrder order) {
    std::string content;
    switch (format) {
        case ExportFormat::Json: content = timeline_to_json(timeline); break;
        case ExportFormat::Markdown: content = timeline_to_markdown(timeline, order); break;
        case ExportFormat::Html: content = timeline_to_html(timeline, order); break;
    }
    atomic_write_file(path, content);
}

}  // namespace chronoweave
