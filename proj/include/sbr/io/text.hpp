#pragma once

// Small line-oriented file helpers shared by the readers of every module.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sbr::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to a sibling temporary and renames it over `path`, so readers never
// observe a half-written file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

// Non-empty lines that do not start with '#', with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const auto line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    if (!line.empty() && line.front() != '#') out.emplace_back(line_no, std::string(line));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// Two-column tab-separated pairs; extra columns are ignored.
inline std::vector<std::pair<std::string, std::string>> parse_pairs_tsv(std::string_view text,
                                                                        const std::string& source = "input") {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [line_no, line] : content_lines(text)) {
    auto fields = split(line, '\t');
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw IoError(source + ":" + std::to_string(line_no) + ": expected two tab-separated fields");
    }
    out.emplace_back(std::move(fields[0]), std::move(fields[1]));
  }
  return out;
}

inline std::string format_double(double x, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

}  // namespace sbr::io
