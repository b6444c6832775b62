#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sarnav {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Digest over several files: SHA-256 of "name  hash\n" lines in the given
/// order, where name is the file name relative to its directory.
std::string combined_digest(std::span<const std::filesystem::path> paths);

}  // namespace sarnav
