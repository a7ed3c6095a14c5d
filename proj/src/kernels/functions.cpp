#include "sbr/kernels/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sbr::kernels {

KmerCounts kmer_counts(std::string_view sequence, std::size_t k) {
  if (k == 0) throw std::invalid_argument("spectrum kernel needs k >= 1");
  KmerCounts counts;
  if (sequence.size() < k) return counts;
  for (std::size_t i = 0; i + k <= sequence.size(); ++i) {
    const auto mer = sequence.substr(i, k);
    auto it = counts.find(mer);
    if (it == counts.end()) {
      counts.emplace(std::string(mer), 1.0);
    } else {
      it->second += 1.0;
    }
  }
  return counts;
}

double spectrum_kernel(const KmerCounts& a, const KmerCounts& b) {
  // Both maps are sorted, so a merge walk visits each shared mer once.
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      sum += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

double spectrum_kernel(std::string_view s1, std::string_view s2, std::size_t k) {
  return spectrum_kernel(kmer_counts(s1, k), kmer_counts(s2, k));
}

double domain_kernel(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& d : a) shared += b.count(d);
  return static_cast<double>(shared) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double correlation_kernel(std::span<const double> x, std::span<const double> y, CovarianceForm form) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("expression profiles differ in length (" + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw std::invalid_argument("empty expression profile");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  if (form == CovarianceForm::double_sum) {
    double sx = 0.0, sy = 0.0;
    for (double v : x) sx += v - mx;
    for (double v : y) sy += v - my;
    return sx * sy / n;
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) sum += (x[t] - mx) * (y[t] - my);
  return sum / n;
}

InteractionGraph::InteractionGraph(std::vector<std::string> vertices) : vertices_(std::move(vertices)) {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!index_.emplace(vertices_[i], i).second) {
      throw std::invalid_argument("duplicate graph vertex " + vertices_[i]);
    }
  }
}

std::size_t InteractionGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("unknown graph vertex '" + id + "'");
  return it->second;
}

bool InteractionGraph::add_edge(const std::string& a, const std::string& b, double weight) {
  if (a == b) throw std::invalid_argument("self-loop on " + a);
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("edge weight must be positive");
  const std::size_t i = index_of(a);
  const std::size_t j = index_of(b);
  if (!seen_.emplace(std::min(i, j), std::max(i, j)).second) return false;
  edges_.push_back({i, j, weight});
  return true;
}

GramMatrix diffusion_kernel(const InteractionGraph& graph, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("diffusion beta must be >= 0");
  const auto n = static_cast<Eigen::Index>(graph.vertices().size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : graph.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    h(a, b) += e.weight;
    h(b, a) += e.weight;
    h(a, a) -= e.weight;
    h(b, b) -= e.weight;
  }
  Eigen::MatrixXd k;
  if (n == 0) {
    k = h;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
    const Eigen::VectorXd scale = (beta * solver.eigenvalues().array()).exp();
    k = solver.eigenvectors() * scale.asDiagonal() * solver.eigenvectors().transpose();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) k(j, i) = k(i, j);
  }
  return GramMatrix(graph.vertices(), std::move(k));
}

}  // namespace sbr::kernels
