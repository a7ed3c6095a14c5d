#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbr/kernels/gram.hpp"

namespace sbr::kernels {

using KmerCounts = std::map<std::string, double, std::less<>>;

// Count of every length-k substring. Throws std::invalid_argument for k = 0.
KmerCounts kmer_counts(std::string_view sequence, std::size_t k);

// <Phi_k(s1), Phi_k(s2)>, the dot product of k-mer count vectors.
double spectrum_kernel(std::string_view s1, std::string_view s2, std::size_t k);
double spectrum_kernel(const KmerCounts& a, const KmerCounts& b);

// |A ∩ B| / (|A| |B|); 0 when either set is empty.
double domain_kernel(const std::set<std::string>& a, const std::set<std::string>& b);

enum class CovarianceForm {
  elementwise,  // (1/n) Σ_t (x_t − μx)(y_t − μy)
  double_sum,   // (1/n) Σ_s Σ_t (x_s − μx)(y_t − μy), the formula as literally printed
};

// Throws std::invalid_argument on length mismatch or empty profiles.
double correlation_kernel(std::span<const double> x, std::span<const double> y,
                          CovarianceForm form = CovarianceForm::elementwise);

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 1.0;
};

// Undirected graph over example ids.
class InteractionGraph {
 public:
  InteractionGraph() = default;
  explicit InteractionGraph(std::vector<std::string> vertices);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_vertex(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t index_of(const std::string& id) const;

  // Throws std::invalid_argument for self-loops, unknown endpoints, or
  // non-positive weights. A repeated edge is ignored and reported as false.
  bool add_edge(const std::string& a, const std::string& b, double weight = 1.0);

 private:
  std::vector<std::string> vertices_;
  std::map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::set<std::pair<std::size_t, std::size_t>> seen_;
};

// exp(beta * H) with H = A − D, the negated weighted Laplacian.
GramMatrix diffusion_kernel(const InteractionGraph& graph, double beta = 1.0);

}  // namespace sbr::kernels
