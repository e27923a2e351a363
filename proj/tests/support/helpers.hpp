#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "chronoweave/corpus.hpp"

namespace cwtest {

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "cwtest") {
        static std::atomic<std::uint64_t> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline chronoweave::NewsArticle make_article(const std::string& url, const std::string& title,
                                             const std::string& body, const std::string& published_at) {
    chronoweave::RawArticleFields raw;
    raw.url = url;
    raw.title = title;
    raw.body = body;
    raw.published_at = published_at;
    return chronoweave::normalize_article(raw);
}

// Word pool for random article generation.
inline const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "ban",     "chip",   "export",  "rules",  "vote",   "deal",    "talks",   "market", "energy", "court",
        "strike",  "merger", "probe",   "budget", "summit", "reform",  "tariff",  "launch", "treaty", "crisis",
        "growth",  "policy", "leaders", "report", "plan",   "borders", "climate", "sector", "prices", "accord",
    };
    return words;
}

inline std::string random_title(std::mt19937& rng, int words = 5) {
    const auto& pool = word_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::string title;
    for (int i = 0; i < words; ++i) {
        if (!title.empty()) title.push_back(' ');
        title += pool[pick(rng)];
    }
    return title;
}

inline chronoweave::NewsArticle random_article(std::mt19937& rng, int index, chronoweave::UtcSeconds latest) {
    std::uniform_int_distribution<std::int64_t> back_days(0, 200);
    chronoweave::UtcSeconds when = latest - back_days(rng) * 86400;
    return make_article("https://example.com/r/" + std::to_string(index), random_title(rng),
                        random_title(rng, 12), chronoweave::format_iso_date_time(when));
}

}  // namespace cwtest
