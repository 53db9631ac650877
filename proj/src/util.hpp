#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace midas {

/// Shortest decimal form that round-trips a double exactly (%.17g fallback).
std::string fmt_double(double value);

double parse_double(const std::string& text);
long parse_long(const std::string& text);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

// FNV-1a 64-bit, used for model-file checksums.
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ull);
std::string to_hex(std::uint64_t value);

/// Writes content to a temp file in the target directory, then renames it over path.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

}  // namespace midas
