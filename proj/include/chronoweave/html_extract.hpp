#pragma once

#include <string>

#include "chronoweave/corpus.hpp"

namespace chronoweave {

struct ExtractedText {
    std::string title;
    std::string body;
};

// Pulls (title, body) out of an HTML document: title is the first non-empty
// of <title> text or the first <h1>; body keeps <p> elements whose text is at
// least 40 characters, joined by blank lines. Throws ExtractionError when no
// title candidate exists.
ExtractedText extract_main_text(const RawDocument& raw);

// Decodes the common named entities plus numeric character references.
std::string decode_entities(std::string_view s);

}  // namespace chronoweave
