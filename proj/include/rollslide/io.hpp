#pragma once

#include <filesystem>
#include <string>

namespace rollslide {

/// Throws IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rollslide
