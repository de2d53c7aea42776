#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace qmpemba::io {

std::string sha256_hex(std::string_view bytes);

// Shortest round-trip scientific notation, independent of the C locale.
std::string format_double(double value);

// Writes the bytes verbatim (binary mode), creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace qmpemba::io
