#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sbr/kernels/build.hpp"
#include "sbr/kernels/gram.hpp"

namespace sbr::kernels {

// Gram CSV: a header row of example ids, then one row of n values per id.
GramMatrix parse_gram_csv(std::string_view text);
std::string format_gram_csv(const GramMatrix& gram);
GramMatrix read_gram_csv(const std::filesystem::path& path);
void write_gram_csv(const std::filesystem::path& path, const GramMatrix& gram);

// FASTA: the id is the first whitespace-delimited token after '>'.
std::map<std::string, std::string> parse_fasta(std::string_view text);

// `protein<TAB>domain_id` rows grouped by protein.
std::map<std::string, std::set<std::string>> parse_annotation_sets(std::string_view text);

// `a<TAB>b[<TAB>weight]` rows. Self-loops are dropped with a warning.
std::vector<Interaction> parse_edge_list(std::string_view text);

// Rows are proteins, columns are conditions. A leading header row is
// detected by a non-numeric second field. Empty, NA and NaN cells are
// replaced by the mean of the protein's observed values; a protein with no
// observed value is an error.
std::map<std::string, std::vector<double>> parse_expression_csv(std::string_view text);

}  // namespace sbr::kernels
