#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace deepads {

// whole-file read; IoError on failure
std::string read_file_bytes(const std::filesystem::path& path);

// write to <path>.tmp then rename, so readers never observe a partial file
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace deepads
