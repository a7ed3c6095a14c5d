#include "sbr/kernels/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "sbr/io/text.hpp"

namespace sbr::kernels {

using io::IoError;

namespace {

bool parse_number(const std::string& field, double& out) {
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double number_at(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  if (!parse_number(field, v)) {
    throw IoError("line " + std::to_string(line_no) + ": '" + field + "' is not a number");
  }
  return v;
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan" || field == "na";
}

}  // namespace

GramMatrix parse_gram_csv(std::string_view text) {
  auto lines = io::content_lines(text);
  if (lines.empty()) throw IoError("empty Gram file");
  std::vector<std::string> ids = io::split(lines[0].second, ',');
  const std::size_t n = ids.size();
  if (lines.size() != n + 1) {
    throw IoError("Gram file has " + std::to_string(n) + " ids but " + std::to_string(lines.size() - 1) + " rows");
  }
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [line_no, line] = lines[i + 1];
    auto fields = io::split(line, ',');
    if (fields.size() != n) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) + " values");
    }
    for (std::size_t j = 0; j < n; ++j) k(i, j) = number_at(fields[j], line_no);
  }
  try {
    return GramMatrix(std::move(ids), std::move(k));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("invalid Gram file: ") + e.what());
  }
}

std::string format_gram_csv(const GramMatrix& gram) {
  std::string out;
  for (std::size_t i = 0; i < gram.size(); ++i) {
    if (i) out += ',';
    out += gram.ids()[i];
  }
  out += '\n';
  for (std::size_t i = 0; i < gram.size(); ++i) {
    for (std::size_t j = 0; j < gram.size(); ++j) {
      if (j) out += ',';
      out += io::format_double(gram(i, j));
    }
    out += '\n';
  }
  return out;
}

GramMatrix read_gram_csv(const std::filesystem::path& path) {
  try {
    return parse_gram_csv(io::read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_gram_csv(const std::filesystem::path& path, const GramMatrix& gram) {
  io::write_file_atomic(path, format_gram_csv(gram));
}

std::map<std::string, std::string> parse_fasta(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string* current = nullptr;
  for (const auto& [line_no, line] : io::content_lines(text)) {
    if (line.front() == '>') {
      const auto header = io::trim(std::string_view(line).substr(1));
      const auto id = std::string(header.substr(0, header.find_first_of(" \t")));
      if (id.empty()) throw IoError("line " + std::to_string(line_no) + ": FASTA header without an id");
      auto [it, fresh] = out.emplace(id, std::string());
      if (!fresh) throw IoError("line " + std::to_string(line_no) + ": duplicate FASTA id " + id);
      current = &it->second;
    } else {
      if (current == nullptr) throw IoError("line " + std::to_string(line_no) + ": sequence before any header");
      for (char c : line) {
        if (c != ' ' && c != '\t') *current += c;
      }
    }
  }
  return out;
}

std::map<std::string, std::set<std::string>> parse_annotation_sets(std::string_view text) {
  std::map<std::string, std::set<std::string>> out;
  for (auto& [protein, item] : io::parse_pairs_tsv(text)) out[protein].insert(item);
  return out;
}

std::vector<Interaction> parse_edge_list(std::string_view text) {
  std::vector<Interaction> out;
  std::size_t loops = 0;
  for (const auto& [line_no, line] : io::content_lines(text)) {
    auto fields = io::split(line, '\t');
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw IoError("line " + std::to_string(line_no) + ": expected two tab-separated vertex ids");
    }
    if (fields[0] == fields[1]) {
      ++loops;
      continue;
    }
    Interaction e{fields[0], fields[1], 1.0};
    if (fields.size() >= 3 && !fields[2].empty()) {
      e.weight = number_at(fields[2], line_no);
      if (!(e.weight > 0.0)) throw IoError("line " + std::to_string(line_no) + ": edge weight must be positive");
    }
    out.push_back(std::move(e));
  }
  if (loops > 0) spdlog::warn("edge list: dropped {} self-loop(s)", loops);
  return out;
}

std::map<std::string, std::vector<double>> parse_expression_csv(std::string_view text) {
  std::map<std::string, std::vector<double>> out;
  auto lines = io::content_lines(text);
  std::size_t first = 0;
  if (!lines.empty()) {
    auto fields = io::split(lines[0].second, ',');
    double ignored = 0.0;
    if (fields.size() >= 2 && !is_missing(fields[1]) && !parse_number(fields[1], ignored)) first = 1;
  }
  std::size_t width = 0;
  std::size_t imputed = 0;
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto& [line_no, line] = lines[r];
    auto fields = io::split(line, ',');
    if (fields.size() < 2 || fields[0].empty()) {
      throw IoError("line " + std::to_string(line_no) + ": expected an id and at least one value");
    }
    if (width == 0) width = fields.size() - 1;
    if (fields.size() - 1 != width) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " values");
    }
    std::vector<double> values(width, NAN);
    double sum = 0.0;
    std::size_t observed = 0;
    for (std::size_t t = 0; t < width; ++t) {
      if (is_missing(fields[t + 1])) continue;
      values[t] = number_at(fields[t + 1], line_no);
      sum += values[t];
      ++observed;
    }
    if (observed == 0) throw IoError("line " + std::to_string(line_no) + ": profile of " + fields[0] + " is all missing");
    const double mean = sum / static_cast<double>(observed);
    for (double& v : values) {
      if (std::isnan(v)) {
        v = mean;
        ++imputed;
      }
    }
    if (!out.emplace(fields[0], std::move(values)).second) {
      throw IoError("line " + std::to_string(line_no) + ": duplicate profile for " + fields[0]);
    }
  }
  if (imputed > 0) spdlog::info("expression: imputed {} missing value(s) with the profile mean", imputed);
  return out;
}

}  // namespace sbr::kernels
