#include "epiwave/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "epiwave/errors.hpp"

namespace epiwave {

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void AtomicFileWriter::commit() {
  const std::filesystem::path tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec)
    throw ConfigError("rename failed for " + path_.string() + ": " + ec.message());
}

}  // namespace epiwave
