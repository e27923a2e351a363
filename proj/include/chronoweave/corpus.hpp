#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoweave/dates.hpp"

namespace chronoweave {

// One normalized web news document. The same type plays both roles of a
// pipeline run: the target article and the context candidates.
struct NewsArticle {
    std::string id;      // 32 lowercase hex chars, content digest
    std::string url;     // absolute URI
    std::string title;   // trimmed, no control characters
    std::string body;    // plain text, may be empty
    std::string source;  // registrable domain of url, lowercased
    UtcSeconds published_at = 0;
    std::optional<UtcSeconds> fetched_at;
    std::optional<std::string> lang;

    friend bool operator==(const NewsArticle&, const NewsArticle&) = default;
};

struct RawDocument {
    std::string url;
    std::string content_type;
    std::string bytes;  // non-empty
    UtcSeconds retrieved_at = 0;
};

// Pre-normalization field bag, straight out of one corpus line.
struct RawArticleFields {
    std::string url;
    std::string title;
    std::string body;
    std::string published_at;  // textual; parsed during normalization
    std::optional<std::string> lang;
    std::optional<std::string> fetched_at;
};

struct CorpusDiagnostics {
    std::size_t loaded = 0;
    std::size_t duplicates_dropped = 0;
    std::vector<std::string> duplicate_ids;
};

// Deterministic over (url, title, date portion of published_at); stable
// across runs and platforms.
std::string article_id(std::string_view url, std::string_view title, UtcSeconds published_at);

// Collapses whitespace, parses the date, derives source and id. Throws
// DateError / ValidationError.
NewsArticle normalize_article(const RawArticleFields& raw);

// Loads a JSON-lines corpus in file order, dropping duplicate ids keep-first.
// Throws IoError (unreadable) or ParseError carrying the 1-based line number.
std::vector<NewsArticle> load_corpus(const std::filesystem::path& path, CorpusDiagnostics* diagnostics = nullptr);

// Writes the corpus back out; load_corpus(save_corpus(x)) == x field for field.
void save_corpus(const std::filesystem::path& path, const std::vector<NewsArticle>& articles);

std::string article_to_json_line(const NewsArticle& article);

}  // namespace chronoweave
