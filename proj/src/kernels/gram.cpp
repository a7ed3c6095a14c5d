#include "sbr/kernels/gram.hpp"

#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace sbr::kernels {

GramMatrix::GramMatrix(std::vector<std::string> ids, Eigen::MatrixXd values)
    : ids_(std::move(ids)), values_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (values_.rows() != n || values_.cols() != n) {
    throw std::invalid_argument("Gram matrix is " + std::to_string(values_.rows()) + "x" +
                                std::to_string(values_.cols()) + " but has " + std::to_string(n) + " ids");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (!std::isfinite(values_(i, j))) throw std::invalid_argument("Gram matrix has a non-finite entry");
      if (values_(i, j) != values_(j, i)) {
        throw std::invalid_argument("Gram matrix is not symmetric at (" + ids_[i] + ", " + ids_[j] + ")");
      }
    }
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw std::invalid_argument("duplicate Gram id " + ids_[i]);
  }
}

std::size_t GramMatrix::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("example '" + id + "' is not in the Gram matrix");
  return it->second;
}

GramMatrix GramMatrix::submatrix(const std::vector<std::string>& ids) const {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) rows.push_back(index_of(id));
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = values_(rows[i], rows[j]);
  return GramMatrix(ids, std::move(sub));
}

PsdReport psd_check(const GramMatrix& gram, double tol) {
  if (gram.size() == 0) return {true, 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
  const double lambda_min = solver.eigenvalues().minCoeff();
  const double trace = gram.matrix().trace();
  const double scale = trace > 0.0 ? trace / static_cast<double>(gram.size()) : 1.0;
  return {lambda_min >= -tol * scale, lambda_min};
}

double normalize_kernel(double raw, double self1, double self2) {
  if (self1 <= 0.0 || self2 <= 0.0) return 0.0;
  return raw / std::sqrt(self1 * self2);
}

GramMatrix normalize_gram(const GramMatrix& gram) {
  const Eigen::MatrixXd& k = gram.matrix();
  const auto n = k.rows();
  Eigen::MatrixXd out(n, n);
  std::size_t degenerate = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (k(i, i) <= 0.0) ++degenerate;
    out(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = normalize_kernel(k(i, j), k(i, i), k(j, j));
      out(j, i) = out(i, j);
    }
  }
  if (degenerate > 0) {
    spdlog::warn("normalize: {} example(s) with zero self-similarity set to the unit vector", degenerate);
  }
  return GramMatrix(gram.ids(), std::move(out));
}

}  // namespace sbr::kernels
