#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

#include "ktl/util/error.hpp"

namespace ktl {

// Writes through a sibling temp file and renames it into place, so a
// reader never observes a partially written output.
inline void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !target.parent_path().empty()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot open for writing: " + tmp.string());
    body(out);
    out.flush();
    if (!out) fail(ErrorKind::kIo, "write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline void write_text_atomically(const std::string& path, std::string_view text) {
  write_atomically(path, [&](std::ostream& out) { out << text; });
}

// Calls fn(line, line_number) for each line; line numbers are 1-based.
// A trailing '\r' is stripped.
inline void for_each_line(std::istream& in, const std::function<void(std::string_view, std::size_t)>& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, number);
  }
}

inline void for_each_line_in_file(const std::string& path,
                                  const std::function<void(std::string_view, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open file: " + path);
  for_each_line(in, fn);
}

}  // namespace ktl
