#include "chronoweave/prompting.hpp"

#include <algorithm>
#include <cctype>

#include "chronoweave/digest.hpp"
#include "chronoweave/errors.hpp"
#include "chronoweave/fsio.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

namespace {

const std::set<std::string> kKnownPlaceholders = {
    "target_title", "target_date",       "target_excerpt",
    "context_list", "task_instructions", "extended_instructions",
};

constexpr std::string_view kFieldSeparator = " || ";

constexpr std::string_view kDefaultTemplateText =
    "You are a news analyst reconstructing the background of a target news article.\n"
    "\n"
    "Target News:\n"
    "Title: {{target_title}}\n"
    "Date: {{target_date}}\n"
    "Excerpt: {{target_excerpt}}\n"
    "\n"
    "Context News:\n"
    "{{context_list}}\n"
    "\n"
    "{{task_instructions}}\n"
    "{{extended_instructions}}\n";

// Dynamic fields must not spoof the story marker or the snippet field
// separator; both substitutions leave tokenization unchanged.
std::string sanitize_field(std::string_view text) {
    std::string out = replace_all(std::string(text), kStoryMarker, "Background Story -");
    std::string collapsed;
    collapsed.reserve(out.size());
    for (char c : out) {
        if (c == '|' && !collapsed.empty() && collapsed.back() == '|') continue;
        collapsed.push_back(c);
    }
    return collapsed;
}

}  // namespace

std::string_view variant_name(PromptVariant variant) {
    return variant == PromptVariant::BaselineOnly ? "baseline" : "extended";
}

PromptVariant variant_from_name(std::string_view name) {
    if (name == "baseline") return PromptVariant::BaselineOnly;
    if (name == "extended") return PromptVariant::ExtendedTask;
    throw InputError("unknown prompt variant: \"" + std::string(name) + "\"");
}

std::size_t estimate_tokens(std::string_view text) {
    return (utf8_length(text) + 3) / 4;
}

ContextSnippet make_snippet(const NewsArticle& article, int index) {
    ContextSnippet snippet;
    snippet.index = index;
    snippet.article_id = article.id;
    snippet.date = format_iso_date(article.published_at);
    snippet.title = article.title;
    snippet.excerpt = first_words(article.body, 60);
    return snippet;
}

std::string context_line(const ContextSnippet& snippet) {
    std::string line = std::to_string(snippet.index);
    line += ". [";
    line += snippet.date;
    line += "] ";
    line += sanitize_field(snippet.title);
    line += kFieldSeparator;
    line += sanitize_field(snippet.excerpt);
    return line;
}

std::size_t snippet_token_estimate(const ContextSnippet& snippet) {
    return estimate_tokens(context_line(snippet));
}

std::vector<std::vector<ContextSnippet>> chunk_candidates(const std::vector<ContextSnippet>& snippets,
                                                          std::size_t budget_tokens, std::size_t overhead_tokens) {
    for (const auto& snippet : snippets) {
        if (overhead_tokens + snippet_token_estimate(snippet) > budget_tokens) {
            throw BudgetError("snippet for article " + snippet.article_id + " exceeds the token budget alone",
                              snippet.article_id);
        }
    }
    std::vector<std::vector<ContextSnippet>> batches;
    std::vector<ContextSnippet> current;
    std::size_t used = overhead_tokens;
    for (const auto& snippet : snippets) {
        std::size_t estimate = snippet_token_estimate(snippet);
        if (!current.empty() && used + estimate > budget_tokens) {
            batches.push_back(std::move(current));
            current.clear();
            used = overhead_tokens;
        }
        current.push_back(snippet);
        used += estimate;
    }
    if (!current.empty()) batches.push_back(std::move(current));

    for (auto& batch : batches) {
        int index = 1;
        for (auto& snippet : batch) snippet.index = index++;
    }
    return batches;
}

PromptTemplate parse_template(std::string text) {
    if (text.find(kStoryMarker) != std::string::npos) {
        throw ValidationError("template text must not hardcode the story marker; it is owned by the extended task");
    }
    PromptTemplate tmpl;
    std::size_t pos = 0;
    while ((pos = text.find("{{", pos)) != std::string::npos) {
        std::size_t end = text.find("}}", pos + 2);
        if (end == std::string::npos) break;  // unclosed braces stay literal
        std::string name = trim(text.substr(pos + 2, end - pos - 2));
        if (kKnownPlaceholders.count(name) == 0) {
            throw TemplateError("unknown placeholder \"" + name + "\" in template", name);
        }
        tmpl.placeholders.insert(name);
        pos = end + 2;
    }
    tmpl.template_id = digest128_hex(text);
    tmpl.text = std::move(text);
    return tmpl;
}

PromptTemplate load_template(const std::filesystem::path& path) {
    return parse_template(read_file(path));
}

PromptTemplate default_template() {
    return parse_template(std::string(kDefaultTemplateText));
}

std::string target_task_instructions() {
    return "Task: For each item in Context News, decide whether it is RELEVANT or IRRELEVANT to the "
           "Target News.\n"
           "Answer with exactly one line per item, in index order, using this format:\n"
           "<index>. <RELEVANT|IRRELEVANT> - <one-sentence rationale>";
}

std::string extended_task_instructions() {
    std::string text = "Extended task: After the relevance lines, add a section that starts with the exact "
                       "marker line\n";
    text += kStoryMarker;
    text += "\nand then narrates the background of the Target News using only the items you labeled "
            "RELEVANT, citing each item as [index].";
    return text;
}

namespace {

// Single left-to-right pass; substituted values are never re-scanned, so
// field text cannot inject further placeholders.
std::string substitute(const std::string& tmpl,
                       const std::vector<std::pair<std::string_view, std::string>>& values) {
    std::string out;
    out.reserve(tmpl.size() + 256);
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tmpl, open, std::string::npos);
            break;
        }
        std::string name = trim(tmpl.substr(open + 2, close - open - 2));
        bool replaced = false;
        for (const auto& [key, value] : values) {
            if (name == key) {
                out.append(value);
                replaced = true;
                break;
            }
        }
        if (!replaced) out.append(tmpl, open, close + 2 - open);
        pos = close + 2;
    }
    return out;
}

std::string render_text(const NewsArticle& target, const std::vector<ContextSnippet>& batch, PromptVariant variant,
                        const PromptTemplate& tmpl) {
    for (const auto& name : kKnownPlaceholders) {
        if (tmpl.placeholders.count(name) == 0) {
            throw TemplateError("template is missing required placeholder \"" + name + "\"", name);
        }
    }
    std::string context_list;
    for (const auto& snippet : batch) {
        if (!context_list.empty()) context_list.push_back('\n');
        context_list += context_line(snippet);
    }
    std::vector<std::pair<std::string_view, std::string>> values = {
        {"target_title", sanitize_field(target.title)},
        {"target_date", format_iso_date(target.published_at)},
        {"target_excerpt", sanitize_field(first_words(target.body, 60))},
        {"context_list", std::move(context_list)},
        {"task_instructions", target_task_instructions()},
        {"extended_instructions", variant == PromptVariant::ExtendedTask ? extended_task_instructions() : ""},
    };
    return substitute(tmpl.text, values);
}

}  // namespace

std::size_t prompt_overhead(const NewsArticle& target, PromptVariant variant, const PromptTemplate& tmpl) {
    return estimate_tokens(render_text(target, {}, variant, tmpl));
}

PromptBundle render_prompt(const NewsArticle& target, std::vector<ContextSnippet> batch, PromptVariant variant,
                           const PromptTemplate& tmpl) {
    if (batch.empty()) throw ValidationError("render_prompt requires a non-empty batch");
    int index = 1;
    for (auto& snippet : batch) snippet.index = index++;

    PromptBundle bundle;
    bundle.target_id = target.id;
    bundle.variant = variant;
    bundle.template_id = tmpl.template_id;
    bundle.rendered = render_text(target, batch, variant, tmpl);
    bundle.token_estimate = estimate_tokens(bundle.rendered);

    std::string canonical = target.id;
    canonical.push_back('\n');
    canonical.append(variant_name(variant));
    canonical.push_back('\n');
    canonical.append(tmpl.template_id);
    canonical.push_back('\n');
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (i != 0) canonical.push_back(',');
        canonical.append(batch[i].article_id);
    }
    bundle.bundle_id = digest128_hex(canonical);
    bundle.snippets = std::move(batch);
    return bundle;
}

}  // namespace chronoweave
