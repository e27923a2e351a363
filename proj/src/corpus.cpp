#include "chronoweave/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "chronoweave/digest.hpp"
#include "chronoweave/errors.hpp"
#include "chronoweave/fetch.hpp"
#include "chronoweave/fsio.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

using nlohmann::json;

std::string article_id(std::string_view url, std::string_view title, UtcSeconds published_at) {
    std::string canonical;
    canonical.reserve(url.size() + title.size() + 12);
    canonical.append(url);
    canonical.push_back('\n');
    canonical.append(title);
    canonical.push_back('\n');
    canonical.append(format_iso_date(published_at));
    return digest128_hex(canonical);
}

NewsArticle normalize_article(const RawArticleFields& raw) {
    NewsArticle article;
    article.url = trim(raw.url);
    if (article.url.empty()) throw ValidationError("article url is empty");
    auto parts = split_url(article.url);
    if (!parts) throw ValidationError("article url is not an absolute http(s) URI: \"" + article.url + "\"");

    article.title = collapse_whitespace(strip_control_chars(raw.title));
    if (article.title.empty()) throw ValidationError("article title is empty after trimming");

    article.body = collapse_whitespace(strip_control_chars(raw.body));
    article.published_at = parse_date_time(raw.published_at);
    if (raw.fetched_at) {
        article.fetched_at = parse_date_time(*raw.fetched_at);
        if (article.published_at > *article.fetched_at) {
            throw ValidationError("published_at is after fetched_at for \"" + article.url + "\"");
        }
    }
    if (raw.lang) {
        std::string lang = trim(*raw.lang);
        if (!lang.empty()) article.lang = lang;
    }
    article.source = registrable_domain(parts->host);
    article.id = article_id(article.url, article.title, article.published_at);
    return article;
}

namespace {

std::string require_string(const json& obj, const char* key, long line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError("line " + std::to_string(line_no) + ": missing or non-string \"" + key + "\"", line_no);
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, long line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
        throw ParseError("line " + std::to_string(line_no) + ": non-string \"" + key + "\"", line_no);
    }
    return it->get<std::string>();
}

}  // namespace

std::vector<NewsArticle> load_corpus(const std::filesystem::path& path, CorpusDiagnostics* diagnostics) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read corpus: " + path.string(), ErrorCategory::Input);

    std::vector<NewsArticle> articles;
    std::unordered_set<std::string> seen;
    CorpusDiagnostics diag;

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw ParseError("line " + std::to_string(line_no) + ": not a JSON object", line_no);
        }
        RawArticleFields raw;
        raw.url = require_string(obj, "url", line_no);
        raw.title = require_string(obj, "title", line_no);
        raw.published_at = require_string(obj, "published_at", line_no);
        if (auto body = optional_string(obj, "body", line_no)) raw.body = *body;
        raw.lang = optional_string(obj, "lang", line_no);
        raw.fetched_at = optional_string(obj, "fetched_at", line_no);

        NewsArticle article;
        try {
            article = normalize_article(raw);
        } catch (const InputError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (!seen.insert(article.id).second) {
            ++diag.duplicates_dropped;
            diag.duplicate_ids.push_back(article.id);
            continue;
        }
        articles.push_back(std::move(article));
    }
    if (in.bad()) throw IoError("read failure: " + path.string(), ErrorCategory::Input);

    diag.loaded = articles.size();
    if (diagnostics) *diagnostics = diag;
    return articles;
}

std::string article_to_json_line(const NewsArticle& article) {
    json obj;
    obj["url"] = article.url;
    obj["title"] = article.title;
    obj["body"] = article.body;
    obj["published_at"] = format_iso_date_time(article.published_at);
    if (article.fetched_at) obj["fetched_at"] = format_iso_date_time(*article.fetched_at);
    if (article.lang) obj["lang"] = *article.lang;
    return obj.dump();
}

void save_corpus(const std::filesystem::path& path, const std::vector<NewsArticle>& articles) {
    std::ostringstream out;
    for (const auto& article : articles) out << article_to_json_line(article) << '\n';
    atomic_write_file(path, out.str());
}

}  // namespace chronoweave
