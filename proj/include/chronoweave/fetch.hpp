#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "chronoweave/corpus.hpp"

namespace chronoweave {

struct UrlParts {
    std::string scheme;      // "http" or "https"
    std::string host;        // lowercased
    int port = 0;            // 0 = scheme default
    std::string path_query;  // begins with '/', query string included
};

std::optional<UrlParts> split_url(std::string_view url);

// eTLD+1 approximation over a built-in list of common two-part public
// suffixes; hosts that are IP literals or single labels pass through.
std::string registrable_domain(std::string_view host);

struct FetchOptions {
    int timeout_ms = 15000;
    int max_redirects = 5;
};

// Single-URL GET. Follows at most max_redirects redirects, then throws
// RedirectError; non-2xx statuses and transport failures throw FetchError.
RawDocument fetch_article(const std::string& url, const FetchOptions& options = {});

}  // namespace chronoweave
