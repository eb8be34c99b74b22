#include "svmf/io.hpp"

#include <filesystem>
#include <fstream>

#include "svmf/errors.hpp"

namespace svmf {

namespace {

void write_and_rename(const std::string& path, const char* data,
                      std::size_t size) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot open for writing: " + tmp.string());
    }
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) {
      throw Error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

void write_file_atomic(const std::string& path,
                       const std::vector<std::uint8_t>& bytes) {
  write_and_rename(path, reinterpret_cast<const char*>(bytes.data()),
                   bytes.size());
}

void write_file_atomic(const std::string& path, const std::string& text) {
  write_and_rename(path, text.data(), text.size());
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open: " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace svmf
