#pragma once
#include <string>

namespace fsel {

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fsel
