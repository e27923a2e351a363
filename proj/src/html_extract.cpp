#include "chronoweave/html_extract.hpp"

#include <array>
#include <cctype>

#include "chronoweave/errors.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

namespace {

void append_utf8(std::string& out, unsigned long cp) {
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) cp = 0xfffd;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

struct NamedEntity {
    std::string_view name;
    std::string_view value;
};
constexpr std::array<NamedEntity, 10> kNamedEntities = {{{"amp", "&"},
                                                         {"lt", "<"},
                                                         {"gt", ">"},
                                                         {"quot", "\""},
                                                         {"apos", "'"},
                                                         {"nbsp", " "},
                                                         {"mdash", "\xe2\x80\x94"},
                                                         {"ndash", "\xe2\x80\x93"},
                                                         {"rsquo", "\xe2\x80\x99"},
                                                         {"lsquo", "\xe2\x80\x98"}}};

// Block-level tags whose opening implicitly closes an open <p>.
constexpr std::array<std::string_view, 14> kBlockTags = {"p",  "div", "section", "article", "table", "ul",   "ol",
                                                         "li", "h1",  "h2",      "h3",      "h4",    "h5",   "h6"};

bool is_block_tag(std::string_view name) {
    for (auto t : kBlockTags) {
        if (name == t) return true;
    }
    return false;
}

}  // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (!name.empty() && name[0] == '#') {
            std::string_view digits = name.substr(1);
            int base = 10;
            if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                base = 16;
                digits = digits.substr(1);
            }
            unsigned long cp = 0;
            bool ok = !digits.empty();
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') {
                    v = c - '0';
                } else if (base == 16 && std::isxdigit(static_cast<unsigned char>(c))) {
                    v = 10 + (std::tolower(static_cast<unsigned char>(c)) - 'a');
                } else {
                    ok = false;
                    break;
                }
                cp = cp * static_cast<unsigned long>(base) + static_cast<unsigned long>(v);
                if (cp > 0x10ffff) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                append_utf8(out, cp);
                i = semi + 1;
                continue;
            }
        } else {
            bool matched = false;
            for (const auto& e : kNamedEntities) {
                if (name == e.name) {
                    out.append(e.value);
                    matched = true;
                    break;
                }
            }
            if (matched) {
                i = semi + 1;
                continue;
            }
        }
        out.push_back(s[i++]);  // unknown entity, keep verbatim
    }
    return out;
}

ExtractedText extract_main_text(const RawDocument& raw) {
    if (!raw.content_type.empty()) {
        std::string lowered = to_lower_ascii(raw.content_type);
        if (lowered.find("html") == std::string::npos && lowered.find("xml") == std::string::npos) {
            throw ExtractionError("not an HTML document (" + raw.content_type + ") from " + raw.url);
        }
    }
    std::string_view html = raw.bytes;

    std::string title_text;
    bool title_seen = false;
    std::string h1_text;
    bool h1_seen = false;
    std::vector<std::string> paragraphs;

    bool in_title = false;
    bool in_h1 = false;
    bool in_p = false;
    std::string current_p;

    auto flush_p = [&] {
        if (in_p) paragraphs.push_back(current_p);
        current_p.clear();
        in_p = false;
    };

    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            std::size_t next = html.find('<', i);
            if (next == std::string_view::npos) next = html.size();
            std::string_view text = html.substr(i, next - i);
            if (in_title && !title_seen) title_text.append(text);
            if (in_h1 && !h1_seen) h1_text.append(text);
            if (in_p) current_p.append(text);
            i = next;
            continue;
        }
        if (starts_with(html.substr(i), "<!--")) {
            std::size_t end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
            std::size_t end = html.find('>', i);
            i = end == std::string_view::npos ? html.size() : end + 1;
            continue;
        }

        std::size_t tag_end = html.find('>', i);
        if (tag_end == std::string_view::npos) break;
        std::string_view tag = html.substr(i + 1, tag_end - i - 1);
        bool closing = !tag.empty() && tag.front() == '/';
        if (closing) tag.remove_prefix(1);
        std::size_t name_len = 0;
        while (name_len < tag.size() && std::isalnum(static_cast<unsigned char>(tag[name_len]))) ++name_len;
        std::string name = to_lower_ascii(tag.substr(0, name_len));
        i = tag_end + 1;

        if (!closing && (name == "script" || name == "style")) {
            std::string close = "</" + name;
            std::size_t at = i;
            std::size_t found = std::string_view::npos;
            while (at < html.size()) {
                std::size_t cand = html.find('<', at);
                if (cand == std::string_view::npos) break;
                if (to_lower_ascii(html.substr(cand, close.size())) == close) {
                    found = cand;
                    break;
                }
                at = cand + 1;
            }
            if (found == std::string_view::npos) break;
            std::size_t gt = html.find('>', found);
            i = gt == std::string_view::npos ? html.size() : gt + 1;
            continue;
        }

        if (name == "title") {
            if (closing) {
                if (in_title) title_seen = true;
                in_title = false;
            } else if (!title_seen) {
                in_title = true;
            }
        } else if (name == "h1") {
            if (closing) {
                if (in_h1) h1_seen = true;
                in_h1 = false;
            } else if (!h1_seen) {
                flush_p();
                in_h1 = true;
            }
        } else if (name == "p") {
            flush_p();
            if (!closing) in_p = true;
        } else if (!closing && is_block_tag(name)) {
            flush_p();
        } else if ((in_p || in_h1) && name == "br") {
            if (in_p) current_p.push_back(' ');
            if (in_h1) h1_text.push_back(' ');
        }
    }
    flush_p();

    std::string title = collapse_whitespace(decode_entities(title_text));
    if (title.empty()) title = collapse_whitespace(decode_entities(h1_text));
    if (title.empty()) throw ExtractionError("no title candidate in document from " + raw.url);

    std::string body;
    for (const auto& p : paragraphs) {
        std::string text = collapse_whitespace(decode_entities(p));
        if (utf8_length(text) < 40) continue;  // boilerplate heuristic
        if (!body.empty()) body.append("\n\n");
        body.append(text);
    }
    return {title, body};
}

}  // namespace chronoweave
