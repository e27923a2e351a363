#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "chronoweave/errors.hpp"

namespace chronoweave {

// Reads a whole file; throws IoError with the given category on failure.
std::string read_file(const std::filesystem::path& path, ErrorCategory on_error = ErrorCategory::Input);

// Writes via a temp file in the same directory plus rename, so an interrupted
// run never leaves a truncated file at the final path.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace chronoweave
