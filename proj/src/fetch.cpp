#include "chronoweave/fetch.hpp"

#include <array>
#include <cctype>
#include <chrono>

#include <httplib.h>

#include "chronoweave/errors.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

namespace {

// Common two-part public suffixes; under any of these the registrable domain
// keeps three labels ("news.bbc.co.uk" -> "bbc.co.uk").
constexpr std::array<std::string_view, 26> kTwoPartSuffixes = {
    "co.uk",  "org.uk", "ac.uk",  "gov.uk", "co.jp",  "ne.jp",  "or.jp",  "com.au", "net.au",
    "org.au", "com.br", "com.cn", "com.sg", "edu.sg", "gov.sg", "co.in",  "co.kr",  "com.mx",
    "com.tr", "com.hk", "co.nz",  "org.nz", "com.tw", "co.za",  "com.ar", "co.id",
};

bool is_ip_literal(std::string_view host) {
    if (host.empty()) return false;
    if (host.front() == '[') return true;  // IPv6
    for (char c : host) {
        if (c != '.' && !std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string resolve_location(const UrlParts& base, const std::string& location) {
    if (split_url(location)) return location;  // already absolute
    std::string prefix = base.scheme + "://" + base.host;
    if (base.port != 0) prefix += ":" + std::to_string(base.port);
    if (!location.empty() && location.front() == '/') return prefix + location;
    // Relative to the directory of the current path.
    std::string path = base.path_query;
    std::size_t q = path.find('?');
    if (q != std::string::npos) path.resize(q);
    std::size_t slash = path.rfind('/');
    path.resize(slash == std::string::npos ? 0 : slash + 1);
    return prefix + path + location;
}

}  // namespace

std::optional<UrlParts> split_url(std::string_view url) {
    UrlParts parts;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) return std::nullopt;
    parts.scheme = to_lower_ascii(url.substr(0, scheme_end));
    if (parts.scheme != "http" && parts.scheme != "https") return std::nullopt;

    std::string_view rest = url.substr(scheme_end + 3);
    std::size_t path_start = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, path_start);
    if (authority.empty()) return std::nullopt;

    // Drop userinfo if present.
    std::size_t at = authority.rfind('@');
    if (at != std::string_view::npos) authority = authority.substr(at + 1);

    std::size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        std::string_view port_sv = authority.substr(colon + 1);
        int port = 0;
        for (char c : port_sv) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            port = port * 10 + (c - '0');
            if (port > 65535) return std::nullopt;
        }
        if (port_sv.empty()) return std::nullopt;
        parts.port = port;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) return std::nullopt;
    parts.host = to_lower_ascii(authority);

    if (path_start == std::string_view::npos) {
        parts.path_query = "/";
    } else {
        std::string_view tail = rest.substr(path_start);
        std::size_t frag = tail.find('#');
        if (frag != std::string_view::npos) tail = tail.substr(0, frag);
        parts.path_query = tail.empty() || tail.front() == '?' ? "/" + std::string(tail) : std::string(tail);
    }
    return parts;
}

std::string registrable_domain(std::string_view host) {
    std::string lowered = to_lower_ascii(host);
    if (is_ip_literal(lowered)) return lowered;

    std::vector<std::string_view> labels;
    std::string_view view = lowered;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= view.size(); ++i) {
        if (i == view.size() || view[i] == '.') {
            labels.push_back(view.substr(start, i - start));
            start = i + 1;
        }
    }
    if (labels.size() <= 2) return lowered;

    std::string last_two = std::string(labels[labels.size() - 2]) + "." + std::string(labels.back());
    std::size_t keep = 2;
    for (std::string_view suffix : kTwoPartSuffixes) {
        if (last_two == suffix) {
            keep = 3;
            break;
        }
    }
    std::string out;
    for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
        if (!out.empty()) out.push_back('.');
        out.append(labels[i]);
    }
    return out;
}

RawDocument fetch_article(const std::string& url, const FetchOptions& options) {
    auto parts = split_url(url);
    if (!parts) throw ValidationError("not an absolute http(s) URL: \"" + url + "\"");

    int redirects = 0;
    UrlParts current = *parts;
    while (true) {
        std::string origin = current.scheme + "://" + current.host;
        if (current.port != 0) origin += ":" + std::to_string(current.port);

        httplib::Client client(origin);
        client.set_follow_location(false);
        client.set_connection_timeout(std::chrono::milliseconds(options.timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(options.timeout_ms));

        auto result = client.Get(current.path_query);
        if (!result) {
            throw FetchError("fetch failed for " + url + ": " + httplib::to_string(result.error()));
        }
        int status = result->status;
        if (status >= 300 && status < 400) {
            std::string location = result->get_header_value("Location");
            if (location.empty()) throw FetchError("redirect without Location from " + url, status);
            if (++redirects > options.max_redirects) {
                throw RedirectError("more than " + std::to_string(options.max_redirects) + " redirects for " + url);
            }
            auto next = split_url(resolve_location(current, location));
            if (!next) throw FetchError("unresolvable redirect target \"" + location + "\"", status);
            current = *next;
            continue;
        }
        if (status < 200 || status >= 300) {
            throw FetchError("HTTP " + std::to_string(status) + " for " + url, status);
        }
        if (result->body.empty()) throw FetchError("empty body for " + url, status);

        RawDocument doc;
        doc.url = url;
        doc.content_type = result->get_header_value("Content-Type");
        doc.bytes = result->body;
        doc.retrieved_at =
            std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
                .count();
        return doc;
    }
}

}  // namespace chronoweave
