#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace newsroom::store::detail {

/// Writes `bytes` to `<target>.tmp`, fsyncs it, renames it over `target` and
/// fsyncs the directory.
void write_atomically(const std::filesystem::path& target, std::string_view bytes);

/// Whole-file read; nullopt if the file does not exist.
std::optional<std::string> read_file(const std::filesystem::path& path);

void fsync_directory(const std::filesystem::path& dir);

}  // namespace newsroom::store::detail
