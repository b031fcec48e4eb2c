#pragma once

#include <filesystem>
#include <string>

namespace epiwave {

/// Shortest decimal string that parses back to exactly the same double.
std::string fmt_double(double v);

/// Accumulates lines, then writes atomically (temp file + rename).
class AtomicFileWriter {
 public:
  explicit AtomicFileWriter(std::filesystem::path path) : path_(std::move(path)) {}

  void line(const std::string& s) {
    buffer_ += s;
    buffer_ += '\n';
  }
  void commit();

 private:
  std::filesystem::path path_;
  std::string buffer_;
};

}  // namespace epiwave
