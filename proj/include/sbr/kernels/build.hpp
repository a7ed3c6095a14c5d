#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sbr/kernels/functions.hpp"
#include "sbr/kernels/gram.hpp"

namespace sbr::kernels {

enum class KernelKind { spectrum, domain, diffusion, correlation };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::spectrum;
  std::size_t k = 3;              // spectrum mer length
  double beta = 1.0;              // diffusion
  CovarianceForm covariance = CovarianceForm::elementwise;
  bool normalize = false;         // cosine-normalize the finished Gram
};

struct Interaction {
  std::string a;
  std::string b;
  double weight = 1.0;
};

// Per-example inputs, keyed by example id. Only the field matching the kernel
// kind is consulted.
struct FeatureStore {
  std::map<std::string, std::string> sequences;
  std::map<std::string, std::set<std::string>> domains;
  std::vector<Interaction> interactions;
  std::map<std::string, std::vector<double>> expression;
};

// Builds the Gram matrix over `ids` in the given order. Missing sequences or
// expression profiles are errors (std::invalid_argument); an example without
// domain annotations has the empty set, and one without interactions is an
// isolated vertex. Interactions touching ids outside `ids` are skipped.
// Rows of the upper triangle are split over `jobs` threads.
GramMatrix build_gram(const KernelSpec& spec, const std::vector<std::string>& ids,
                      const FeatureStore& features, std::size_t jobs = 1);

}  // namespace sbr::kernels
