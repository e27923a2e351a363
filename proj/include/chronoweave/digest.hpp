#pragma once

#include <string>
#include <string_view>

namespace chronoweave {

// First 128 bits of SHA-256 over the input, rendered as 32 lowercase hex
// chars. Every content id in the project (article ids, cache keys, template
// and bundle ids) goes through this one function.
std::string digest128_hex(std::string_view data);

}  // namespace chronoweave
