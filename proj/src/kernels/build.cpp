#include "sbr/kernels/build.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

namespace sbr::kernels {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::spectrum: return "spectrum";
    case KernelKind::domain: return "domain";
    case KernelKind::diffusion: return "diffusion";
    case KernelKind::correlation: return "correlation";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
  for (KernelKind k : {KernelKind::spectrum, KernelKind::domain, KernelKind::diffusion, KernelKind::correlation}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

namespace {

// Fills the upper triangle with entry(i, j) over `jobs` threads, then mirrors.
Eigen::MatrixXd pairwise(std::size_t n, std::size_t jobs, const std::function<double(std::size_t, std::size_t)>& entry) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto rows = [&](std::size_t worker, std::size_t stride) {
    // Row i has n - i entries; interleaving rows balances the triangle.
    for (std::size_t i = worker; i < n; i += stride)
      for (std::size_t j = i; j < n; ++j) k(i, j) = entry(i, j);
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(rows, w, jobs);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k(j, i) = k(i, j);
  return k;
}

template <typename Map>
std::vector<const typename Map::mapped_type*> lookup(const Map& map, const std::vector<std::string>& ids,
                                                     const char* what) {
  std::vector<const typename Map::mapped_type*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = map.find(id);
    if (it == map.end()) throw std::invalid_argument(std::string("no ") + what + " for example '" + id + "'");
    out.push_back(&it->second);
  }
  return out;
}

}  // namespace

GramMatrix build_gram(const KernelSpec& spec, const std::vector<std::string>& ids, const FeatureStore& features,
                      std::size_t jobs) {
  if (ids.empty()) throw std::invalid_argument("cannot build a Gram matrix over zero examples");
  const std::size_t n = ids.size();
  Eigen::MatrixXd k;
  switch (spec.kind) {
    case KernelKind::spectrum: {
      auto seqs = lookup(features.sequences, ids, "sequence");
      std::vector<KmerCounts> counts;
      counts.reserve(n);
      for (const auto* s : seqs) counts.push_back(kmer_counts(*s, spec.k));
      k = pairwise(n, jobs, [&](std::size_t i, std::size_t j) { return spectrum_kernel(counts[i], counts[j]); });
      break;
    }
    case KernelKind::domain: {
      static const std::set<std::string> kNone;
      std::vector<const std::set<std::string>*> sets;
      std::size_t missing = 0;
      for (const auto& id : ids) {
        auto it = features.domains.find(id);
        if (it == features.domains.end()) ++missing;
        sets.push_back(it == features.domains.end() ? &kNone : &it->second);
      }
      if (missing > 0) spdlog::info("domain kernel: {} example(s) without annotations", missing);
      k = pairwise(n, jobs, [&](std::size_t i, std::size_t j) { return domain_kernel(*sets[i], *sets[j]); });
      break;
    }
    case KernelKind::diffusion: {
      InteractionGraph graph(ids);
      std::size_t skipped = 0;
      for (const auto& e : features.interactions) {
        if (e.a == e.b || !graph.has_vertex(e.a) || !graph.has_vertex(e.b)) {
          ++skipped;
          continue;
        }
        graph.add_edge(e.a, e.b, e.weight);
      }
      if (skipped > 0) spdlog::info("diffusion kernel: skipped {} interaction(s) outside the example set", skipped);
      return spec.normalize ? normalize_gram(diffusion_kernel(graph, spec.beta)) : diffusion_kernel(graph, spec.beta);
    }
    case KernelKind::correlation: {
      auto profiles = lookup(features.expression, ids, "expression profile");
      k = pairwise(n, jobs, [&](std::size_t i, std::size_t j) {
        return correlation_kernel(*profiles[i], *profiles[j], spec.covariance);
      });
      break;
    }
  }
  GramMatrix gram(ids, std::move(k));
  return spec.normalize ? normalize_gram(gram) : gram;
}

}  // namespace sbr::kernels
