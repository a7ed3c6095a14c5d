#include "sbr/eval/folds.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "sbr/io/text.hpp"

namespace sbr::eval {

Folds generate_folds(std::size_t n, const std::vector<std::string>& proteins,
                     const std::map<std::string, std::set<std::string>>& term_proteins, std::uint64_t seed) {
  std::vector<std::string> sorted = proteins;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate protein in fold input");
  }
  if (n < 2) throw std::invalid_argument("need at least 2 folds");
  if (n > sorted.size()) {
    throw std::invalid_argument(std::to_string(n) + " folds for " + std::to_string(sorted.size()) + " proteins");
  }

  // Visiting rank of every protein: sorted order, or a seeded shuffle of it.
  std::vector<std::size_t> order(sorted.size());
  std::iota(order.begin(), order.end(), 0);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::unordered_map<std::string, std::size_t> rank;
  for (std::size_t r = 0; r < order.size(); ++r) rank.emplace(sorted[order[r]], r);

  std::vector<std::pair<std::size_t, std::string>> terms;
  for (const auto& [term, members] : term_proteins) {
    for (const auto& p : members)
      if (!rank.count(p)) throw std::invalid_argument("term " + term + " names unknown protein " + p);
    terms.emplace_back(members.size(), term);
  }
  std::sort(terms.begin(), terms.end());

  Folds folds(n);
  std::vector<bool> assigned(sorted.size(), false);
  auto deal = [&](std::vector<std::size_t> ranks) {
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t r : ranks) {
      if (assigned[r]) continue;
      assigned[r] = true;
      auto smallest = std::min_element(folds.begin(), folds.end(),
                                       [](const auto& a, const auto& b) { return a.size() < b.size(); });
      smallest->push_back(sorted[order[r]]);
    }
  };
  for (const auto& [count, term] : terms) {
    std::vector<std::size_t> ranks;
    for (const auto& p : term_proteins.at(term)) ranks.push_back(rank.at(p));
    deal(std::move(ranks));
  }
  std::vector<std::size_t> all(sorted.size());
  std::iota(all.begin(), all.end(), 0);
  deal(std::move(all));

  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::string format_folds_tsv(const Folds& folds) {
  std::vector<std::pair<std::string, std::size_t>> rows;
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (const auto& p : folds[f]) rows.emplace_back(p, f);
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto& [p, f] : rows) out += p + "\t" + std::to_string(f) + "\n";
  return out;
}

Folds parse_folds_tsv(std::string_view text) {
  Folds folds;
  std::set<std::string> seen;
  for (const auto& [line_no, line] : io::content_lines(text)) {
    const auto where = "folds line " + std::to_string(line_no) + ": ";
    const auto f = io::split(line, '\t');
    if (f.size() != 2) throw io::IoError(where + "expected protein<TAB>fold");
    std::size_t index = 0;
    try {
      std::size_t used = 0;
      index = std::stoul(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw io::IoError(where + "bad fold index '" + f[1] + "'");
    }
    if (!seen.insert(f[0]).second) throw io::IoError(where + "protein " + f[0] + " listed twice");
    if (index >= folds.size()) folds.resize(index + 1);
    folds[index].push_back(f[0]);
  }
  for (std::size_t i = 0; i < folds.size(); ++i)
    if (folds[i].empty()) throw io::IoError("fold " + std::to_string(i) + " is empty");
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace sbr::eval
