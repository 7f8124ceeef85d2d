#pragma once

#include <filesystem>
#include <string>

#include "wordsig/bytes.hpp"

namespace wordsig {

// All functions throw Error(Io) on failure.
Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target, so a
// reader never observes a partially written file. `mode` applies to the new file.
void write_file_atomic(const std::filesystem::path& path, ByteView data,
                       std::filesystem::perms mode = std::filesystem::perms::owner_read |
                                                     std::filesystem::perms::owner_write |
                                                     std::filesystem::perms::group_read |
                                                     std::filesystem::perms::others_read);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace wordsig
