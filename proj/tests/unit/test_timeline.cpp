#include <doctest.h>

#include <algorithm>
#include <random>

#include "chronoweave/errors.hpp"
#include "chronoweave/text.hpp"
#include "chronoweave/timeline.hpp"
#include "support/helpers.hpp"

using namespace chronoweave;
using cwtest::TempDir;
using cwtest::make_article;

namespace {

RelevanceJudgment judge(const NewsArticle& target, const NewsArticle& context, Label label, int index = 1) {
    RelevanceJudgment judgment;
    judgment.target_id = target.id;
    judgment.context_id = context.id;
    judgment.label = label;
    judgment.source_index = index;
    judgment.bundle_id = "b0";
    return judgment;
}

}  // namespace

TEST_CASE("zero relevant judgments yield a target-only timeline") {
    auto target = make_article("https://e.example/t", "the target", "body", "2023-10-17");
    auto other = make_article("https://e.example/o", "other", "body", "2023-10-01");
    std::vector<NewsArticle> corpus = {target, other};
    std::vector<RelevanceJudgment> judgments = {judge(target, other, Label::Irrelevant)};

    auto timeline = assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                             target.published_at);
    REQUIRE(timeline.entries.size() == 1);
    CHECK(timeline.entries[0].is_target);
    CHECK(timeline.entries[0].article_id == target.id);
}

TEST_CASE("entries come out in ascending date order with the target last") {
    auto target = make_article("https://e.example/t", "the target", "body", "2023-10-17");
    auto a = make_article("https://e.example/a", "first event", "body", "2023-10-05");
    auto b = make_article("https://e.example/b", "second event", "body", "2023-10-01");
    auto c = make_article("https://e.example/c", "third event", "body", "2023-10-12");
    std::vector<NewsArticle> corpus = {target, a, b, c};
    std::vector<RelevanceJudgment> judgments = {judge(target, a, Label::Relevant, 1),
                                                judge(target, b, Label::Relevant, 2),
                                                judge(target, c, Label::Relevant, 3)};

    auto timeline = assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                             target.published_at);
    REQUIRE(timeline.entries.size() == 4);
    CHECK(std::is_sorted(timeline.entries.begin(), timeline.entries.end(),
                         [](const TimelineEntry& x, const TimelineEntry& y) { return x.date < y.date; }));
    CHECK(timeline.entries.back().is_target);

    // Permutation invariance over the judgments list.
    std::vector<RelevanceJudgment> shuffled = {judgments[2], judgments[0], judgments[1]};
    auto again = assemble(target, shuffled, corpus, std::nullopt, PromptVariant::BaselineOnly, target.published_at);
    CHECK(again == timeline);
}

TEST_CASE("same date and casefolded title collapse to the smaller id") {
    auto target = make_article("https://e.example/t", "the target", "body", "2023-10-17");
    auto a = make_article("https://e.example/a", "Chip  Ban Widens", "body", "2023-10-05");
    auto b = make_article("https://e.example/b", "chip ban widens", "body", "2023-10-05");
    std::vector<NewsArticle> corpus = {target, a, b};
    std::vector<RelevanceJudgment> judgments = {judge(target, a, Label::Relevant, 1),
                                                judge(target, b, Label::Relevant, 2)};

    auto timeline = assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                             target.published_at);
    REQUIRE(timeline.entries.size() == 2);
    const std::string survivor = std::min(a.id, b.id);
    CHECK(timeline.entries[0].article_id == survivor);
    CHECK(timeline.entries.size() <= 1 + 2);  // dedup only removes
}

TEST_CASE("conflicting labels for one context id are an error") {
    auto target = make_article("https://e.example/t", "the target", "body", "2023-10-17");
    auto a = make_article("https://e.example/a", "context", "body", "2023-10-05");
    std::vector<NewsArticle> corpus = {target, a};
    std::vector<RelevanceJudgment> judgments = {judge(target, a, Label::Relevant, 1),
                                                judge(target, a, Label::Irrelevant, 1)};
    CHECK_THROWS_WITH_AS(assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                                  target.published_at),
                         doctest::Contains(a.id.c_str()), ConflictError);
}

TEST_CASE("duplicate same-label judgments are collapsed silently") {
    auto target = make_article("https://e.example/t", "the target", "body", "2023-10-17");
    auto a = make_article("https://e.example/a", "context", "body", "2023-10-05");
    std::vector<NewsArticle> corpus = {target, a};
    std::vector<RelevanceJudgment> judgments = {judge(target, a, Label::Relevant, 1),
                                                judge(target, a, Label::Relevant, 1)};
    auto timeline = assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                             target.published_at);
    CHECK(timeline.entries.size() == 2);
}

TEST_CASE("unresolvable context ids are lookup errors") {
    auto target = make_article("https://e.example/t", "the target", "body", "2023-10-17");
    auto ghost = make_article("https://e.example/g", "ghost", "body", "2023-10-05");
    std::vector<NewsArticle> corpus = {target};
    std::vector<RelevanceJudgment> judgments = {judge(target, ghost, Label::Relevant, 1)};
    CHECK_THROWS_AS(assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                             target.published_at),
                    LookupError);
}

TEST_CASE("exports are byte-deterministic and JSON round-trips") {
    TempDir dir;
    auto target = make_article("https://e.example/t", "the target & more", "word ", "2023-10-17");
    auto a = make_article("https://e.example/a", "first <event>", "body text here", "2023-10-05");
    std::vector<NewsArticle> corpus = {target, a};
    std::vector<RelevanceJudgment> judgments = {judge(target, a, Label::Relevant, 1)};
    BackgroundStory story;
    story.target_id = target.id;
    story.bundle_id = "b0";
    story.text = "It began earlier [1].";
    story.cited_indices = {1};

    auto timeline = assemble(target, judgments, corpus, story, PromptVariant::ExtendedTask, target.published_at);

    export_timeline(timeline, ExportFormat::Json, dir.file("t.json"));
    export_timeline(timeline, ExportFormat::Json, dir.file("t2.json"));
    CHECK(cwtest::read_file(dir.file("t.json")) == cwtest::read_file(dir.file("t2.json")));

    auto reloaded = timeline_from_json(cwtest::read_file(dir.file("t.json")));
    CHECK(reloaded == timeline);

    export_timeline(timeline, ExportFormat::Markdown, dir.file("t.md"));
    export_timeline(timeline, ExportFormat::Html, dir.file("t.html"));
    std::string markdown = cwtest::read_file(dir.file("t.md"));
    CHECK(markdown.find("# Timeline: the target & more") == 0);
    CHECK(markdown.find("- **2023-10-05** \xe2\x80\x94 first <event>") != std::string::npos);
    CHECK(markdown.find("## Background") != std::string::npos);
    std::string html = cwtest::read_file(dir.file("t.html"));
    CHECK(html.find("first &lt;event&gt;") != std::string::npos);
    CHECK(html.find("<!DOCTYPE html>") == 0);
}

TEST_CASE("markdown of a single-entry timeline has exactly one bullet") {
    auto target = make_article("https://e.example/t", "alone", "", "2023-10-17");
    std::vector<NewsArticle> corpus = {target};
    auto timeline = assemble(target, {}, corpus, std::nullopt, PromptVariant::BaselineOnly, target.published_at);
    std::string markdown = timeline_to_markdown(timeline);
    std::size_t bullets = 0;
    for (std::string_view line : split_lines(markdown)) {
        if (line.rfind("- ", 0) == 0) ++bullets;
    }
    CHECK(bullets == 1);
}

TEST_CASE("descending order flips markdown and html but not JSON") {
    auto target = make_article("https://e.example/t", "the target", "", "2023-10-17");
    auto a = make_article("https://e.example/a", "earlier", "", "2023-10-05");
    std::vector<NewsArticle> corpus = {target, a};
    std::vector<RelevanceJudgment> judgments = {judge(target, a, Label::Relevant, 1)};
    auto timeline = assemble(target, judgments, corpus, std::nullopt, PromptVariant::BaselineOnly,
                             target.published_at);

    std::string descending = timeline_to_markdown(timeline, EntryOrder::Descending);
    CHECK(descending.find("2023-10-17") < descending.find("2023-10-05"));
    // The stored value stays ascending.
    CHECK(timeline.entries[0].date == "2023-10-05");
}

TEST_CASE("export into a missing directory is an IO error") {
    auto target = make_article("https://e.example/t", "alone", "", "2023-10-17");
    std::vector<NewsArticle> corpus = {target};
    auto timeline = assemble(target, {}, corpus, std::nullopt, PromptVariant::BaselineOnly, target.published_at);
    CHECK_THROWS_AS(export_timeline(timeline, ExportFormat::Json, "/nonexistent-dir-cw/x.json"), IoError);
}
