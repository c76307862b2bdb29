#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ufd {

std::string read_file(const std::filesystem::path& path);  // throws IoError

// Writes to a sibling temp file and renames it over `path`. On failure the
// temp file is removed and `path` is left untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// 64-bit FNV-1a.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace ufd
