#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace svmf {

// Writes via a temp file plus rename, so interrupted runs never leave
// partial artifacts. Parent directories are created as needed.
void write_file_atomic(const std::string& path,
                       const std::vector<std::uint8_t>& bytes);
void write_file_atomic(const std::string& path, const std::string& text);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace svmf
