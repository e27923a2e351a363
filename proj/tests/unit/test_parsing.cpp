#include <doctest.h>

#include <random>

#include "chronoweave/errors.hpp"
#include "chronoweave/parsing.hpp"
#include "support/helpers.hpp"

using namespace chronoweave;
using cwtest::make_article;

namespace {

PromptBundle bundle_of(int n) {
    auto target = make_article("https://e.example/t", "target title words", "body", "2023-10-17");
    std::vector<ContextSnippet> batch;
    for (int i = 1; i <= n; ++i) {
        auto article = make_article("https://e.example/c" + std::to_string(i), "snippet " + std::to_string(i),
                                    "body", "2023-10-01");
        batch.push_back(make_snippet(article, i));
    }
    return render_prompt(target, batch, PromptVariant::ExtendedTask, default_template());
}

}  // namespace

TEST_CASE("well-formed judgment lines parse cleanly") {
    auto bundle = bundle_of(2);
    auto parsed = parse_judgments("1. RELEVANT - shares actor\n2. IRRELEVANT", bundle);
    REQUIRE(parsed.judgments.size() == 2);
    CHECK(parsed.judgments[0].label == Label::Relevant);
    CHECK(parsed.judgments[0].rationale == "shares actor");
    CHECK(parsed.judgments[0].context_id == bundle.snippets[0].article_id);
    CHECK(parsed.judgments[1].label == Label::Irrelevant);
    CHECK_FALSE(parsed.judgments[1].rationale.has_value());
    CHECK(parsed.diagnostics.clean());
}

TEST_CASE("separators and case are tolerated, output is ordered by index") {
    auto bundle = bundle_of(2);
    auto parsed = parse_judgments("2) irrelevant\n1: Relevant", bundle);
    REQUIRE(parsed.judgments.size() == 2);
    CHECK(parsed.judgments[0].source_index == 1);
    CHECK(parsed.judgments[0].label == Label::Relevant);
    CHECK(parsed.judgments[1].source_index == 2);
    CHECK(parsed.judgments[1].label == Label::Irrelevant);
    CHECK(parsed.diagnostics.clean());

    auto dashed = parse_judgments("1 - RELEVANT\n2 . IRRELEVANT : fine", bundle);
    CHECK(dashed.judgments[0].label == Label::Relevant);
    CHECK(dashed.judgments[1].rationale == "fine");
    CHECK(dashed.diagnostics.clean());
}

TEST_CASE("unknown labels become unparsed lines with materialized defaults") {
    auto bundle = bundle_of(2);
    auto parsed = parse_judgments("1. MAYBE", bundle);
    REQUIRE(parsed.judgments.size() == 2);
    CHECK(parsed.judgments[0].label == Label::Irrelevant);
    CHECK(parsed.judgments[0].rationale == "unparsed-default");
    CHECK(parsed.judgments[1].label == Label::Irrelevant);
    CHECK(parsed.judgments[1].rationale == "unparsed-default");
    REQUIRE(parsed.diagnostics.unparsed_lines.size() == 1);
    CHECK(parsed.diagnostics.unparsed_lines[0].first == 1);
    CHECK(parsed.diagnostics.unparsed_lines[0].second == "1. MAYBE");
    // Index 1 was mentioned (albeit unparseable); only 2 is missing.
    CHECK(parsed.diagnostics.missing_indices == std::set<int>{2});
}

TEST_CASE("synonyms are not accepted as labels") {
    auto bundle = bundle_of(1);
    auto parsed = parse_judgments("1. RELATED - close call", bundle);
    CHECK(parsed.judgments[0].rationale == "unparsed-default");
    CHECK(parsed.diagnostics.unparsed_lines.size() == 1);
}

TEST_CASE("a rationale without its separator does not parse") {
    auto bundle = bundle_of(1);
    auto parsed = parse_judgments("1. RELEVANT shares actor", bundle);
    CHECK(parsed.judgments[0].rationale == "unparsed-default");
    CHECK(parsed.diagnostics.unparsed_lines.size() == 1);
    CHECK(parsed.diagnostics.missing_indices.empty());  // mentioned
}

TEST_CASE("duplicate indices keep the first occurrence") {
    auto bundle = bundle_of(2);
    auto parsed = parse_judgments("1. RELEVANT - first\n1. IRRELEVANT - second\n2. IRRELEVANT", bundle);
    REQUIRE(parsed.judgments.size() == 2);
    CHECK(parsed.judgments[0].label == Label::Relevant);
    CHECK(parsed.judgments[0].rationale == "first");
    CHECK(parsed.diagnostics.duplicate_indices == std::set<int>{1});
    CHECK(parsed.diagnostics.unparsed_lines.empty());
}

TEST_CASE("out-of-range indices go to unparsed lines") {
    auto bundle = bundle_of(2);
    auto parsed = parse_judgments("0. RELEVANT\n3. RELEVANT\n99999999999. RELEVANT\n1. RELEVANT\n2. IRRELEVANT",
                                  bundle);
    CHECK(parsed.judgments.size() == 2);
    CHECK(parsed.diagnostics.unparsed_lines.size() == 3);
    CHECK(parsed.diagnostics.missing_indices.empty());
    CHECK(parsed.diagnostics.duplicate_indices.empty());
}

TEST_CASE("text after the story marker never produces judgments") {
    auto bundle = bundle_of(2);
    std::string response = "1. RELEVANT - yes\n2. IRRELEVANT\nBackground Story:\n1. In 2020 the story began [1].";
    auto parsed = parse_judgments(response, bundle);
    CHECK(parsed.judgments[0].label == Label::Relevant);
    CHECK(parsed.judgments[1].label == Label::Irrelevant);
    CHECK(parsed.diagnostics.clean());  // the story's "1. In 2020..." is not an unparsed line
    CHECK(parsed.diagnostics.duplicate_indices.empty());
}

TEST_CASE("parse_judgments is total over hostile input") {
    auto bundle = bundle_of(3);
    std::mt19937 rng(99);
    for (int round = 0; round < 500; ++round) {
        std::string blob;
        std::uniform_int_distribution<int> len(0, 300);
        std::uniform_int_distribution<int> byte(0, 255);
        int n = len(rng);
        for (int i = 0; i < n; ++i) blob.push_back(static_cast<char>(byte(rng)));
        auto parsed = parse_judgments(blob, bundle);
        CHECK(parsed.judgments.size() == 3);
    }
}

TEST_CASE("parse_story extracts text and citations") {
    auto bundle = bundle_of(3);
    auto story = parse_story("labels...\nBackground Story:\nThe ban follows [1] and [3].", bundle);
    REQUIRE(story.has_value());
    CHECK(story->text == "The ban follows [1] and [3].");
    CHECK(story->cited_indices == std::set<int>{1, 3});
    CHECK(story->bundle_id == bundle.bundle_id);
}

TEST_CASE("parse_story returns absent without a marker") {
    auto bundle = bundle_of(1);
    CHECK_FALSE(parse_story("1. RELEVANT - done", bundle).has_value());
}

TEST_CASE("a marker with an empty body is a story error") {
    auto bundle = bundle_of(1);
    CHECK_THROWS_AS(parse_story("Background Story:\n\n", bundle), StoryError);
    CHECK_THROWS_AS(parse_story("x\nBackground Story:", bundle), StoryError);
}

TEST_CASE("marker must be a whole line") {
    auto bundle = bundle_of(1);
    CHECK_FALSE(parse_story("mentions Background Story: inline only", bundle).has_value());
    // Trimmed match is fine.
    CHECK(parse_story("  Background Story:  \nbody", bundle).has_value());
}

TEST_CASE("multi-digit and malformed citations") {
    auto bundle = bundle_of(2);
    auto story = parse_story("Background Story:\nSee [12] and [x] and [3camera] and [7].", bundle);
    REQUIRE(story.has_value());
    CHECK(story->cited_indices == std::set<int>{12, 7});
}

TEST_CASE("validate_story_citations computes the set difference") {
    auto bundle = bundle_of(3);
    auto parsed = parse_judgments("1. RELEVANT\n2. RELEVANT\n3. RELEVANT", bundle);

    BackgroundStory story;
    story.target_id = bundle.target_id;
    story.bundle_id = bundle.bundle_id;
    story.text = "cites [1] and [3]";
    story.cited_indices = {1, 3};
    CHECK(validate_story_citations(story, parsed.judgments).citation_violations.empty());

    story.cited_indices = {4};
    CHECK(validate_story_citations(story, parsed.judgments).citation_violations == std::set<int>{4});

    story.cited_indices = {};
    CHECK(validate_story_citations(story, parsed.judgments).citation_violations.empty());
}

TEST_CASE("validate_story_citations flags irrelevant citations") {
    auto bundle = bundle_of(2);
    auto parsed = parse_judgments("1. RELEVANT\n2. IRRELEVANT", bundle);
    BackgroundStory story;
    story.target_id = bundle.target_id;
    story.bundle_id = bundle.bundle_id;
    story.text = "cites [2]";
    story.cited_indices = {2};
    CHECK(validate_story_citations(story, parsed.judgments).citation_violations == std::set<int>{2});
}

TEST_CASE("bundle mismatch is a consistency error") {
    auto bundle_a = bundle_of(1);
    auto bundle_b = bundle_of(2);
    auto parsed = parse_judgments("1. RELEVANT", bundle_b);
    BackgroundStory story;
    story.target_id = bundle_a.target_id;
    story.bundle_id = bundle_a.bundle_id;
    story.text = "text";
    CHECK_THROWS_AS(validate_story_citations(story, parsed.judgments), ConsistencyError);
}
