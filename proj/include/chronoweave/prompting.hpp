#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chronoweave/corpus.hpp"

namespace chronoweave {

// The experiment's two arms: the relevance-labeling task alone, or the same
// task plus the background-story instruction that is meant to improve it.
enum class PromptVariant {
    BaselineOnly,
    ExtendedTask,
};

std::string_view variant_name(PromptVariant variant);          // "baseline" / "extended"
PromptVariant variant_from_name(std::string_view name);       // throws InputError

// The exact marker line the extended task asks the model to emit before the
// story section. Also the boundary the response parser keys on.
inline constexpr std::string_view kStoryMarker = "Background Story:";

// One context article as shown to the model inside a prompt.
struct ContextSnippet {
    int index = 0;           // 1-based, local to one prompt
    std::string article_id;
    std::string date;        // ISO date
    std::string title;
    std::string excerpt;     // at most 60 body words

    friend bool operator==(const ContextSnippet&, const ContextSnippet&) = default;
};

struct PromptTemplate {
    std::string text;
    std::set<std::string> placeholders;
    std::string template_id;  // digest of the file bytes
};

struct PromptBundle {
    std::string bundle_id;
    std::string target_id;
    PromptVariant variant = PromptVariant::BaselineOnly;
    std::vector<ContextSnippet> snippets;
    std::string template_id;
    std::string rendered;
    std::size_t token_estimate = 0;
};

// ceil(unicode scalar count / 4); backend-agnostic and deliberately high.
std::size_t estimate_tokens(std::string_view text);

ContextSnippet make_snippet(const NewsArticle& article, int index);

// The one-line form of a snippet inside the prompt's context section.
std::string context_line(const ContextSnippet& snippet);

std::size_t snippet_token_estimate(const ContextSnippet& snippet);

// Greedy first-fit batching in input order; indices are re-assigned 1..k
// inside each batch. Throws BudgetError naming the article whose single
// snippet cannot fit.
std::vector<std::vector<ContextSnippet>> chunk_candidates(const std::vector<ContextSnippet>& snippets,
                                                          std::size_t budget_tokens, std::size_t overhead_tokens);

// Parses {{placeholder}} occurrences; unknown names throw TemplateError.
PromptTemplate parse_template(std::string text);
PromptTemplate load_template(const std::filesystem::path& path);

// Built-in copy of templates/default.tmpl, used when no template path is given.
PromptTemplate default_template();

std::string target_task_instructions();
std::string extended_task_instructions();

// Token estimate of the template rendered for this target with an empty
// context section; chunking budgets subtract it.
std::size_t prompt_overhead(const NewsArticle& target, PromptVariant variant, const PromptTemplate& tmpl);

// Fills every placeholder and stamps the bundle identity. The extended
// instruction block (and with it the story marker) appears iff the variant is
// ExtendedTask. Throws TemplateError when a required placeholder is missing.
PromptBundle render_prompt(const NewsArticle& target, std::vector<ContextSnippet> batch, PromptVariant variant,
                           const PromptTemplate& tmpl);

}  // namespace chronoweave
