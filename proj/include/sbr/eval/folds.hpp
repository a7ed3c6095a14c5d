#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sbr::eval {

using Folds = std::vector<std::vector<std::string>>;

// Stratified folds. Terms are visited by ascending protein count (ties by
// id); each still-unassigned protein of a term goes to the smallest fold,
// lowest index on ties. Proteins outside every term are dealt the same way
// at the end. Within a term, proteins are taken in sorted order for seed 0
// and in a seeded random order otherwise. Each fold comes back sorted.
// Throws std::invalid_argument if n < 2, n exceeds the protein count, or a
// term names an unknown protein.
Folds generate_folds(std::size_t n, const std::vector<std::string>& proteins,
                     const std::map<std::string, std::set<std::string>>& term_proteins, std::uint64_t seed = 0);

// folds.tsv: protein<TAB>fold_index, proteins sorted.
std::string format_folds_tsv(const Folds& folds);
Folds parse_folds_tsv(std::string_view text);

}  // namespace sbr::eval
