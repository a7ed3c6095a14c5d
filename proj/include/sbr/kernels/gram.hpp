#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace sbr::kernels {

// Dense symmetric similarity matrix with the example ids it is indexed by.
// Immutable once built; symmetry is checked exactly on construction.
class GramMatrix {
 public:
  GramMatrix() = default;
  // Throws std::invalid_argument if the matrix is not square, does not match
  // the id count, is not exactly symmetric, holds non-finite values, or the
  // ids repeat.
  GramMatrix(std::vector<std::string> ids, Eigen::MatrixXd values);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& matrix() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  // Throws std::out_of_range for unknown ids.
  std::size_t index_of(const std::string& id) const;

  // Rows/columns for `ids`, in that order.
  GramMatrix submatrix(const std::vector<std::string>& ids) const;

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd values_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct PsdReport {
  bool pass = false;
  double min_eigenvalue = 0.0;
};

// Passes when the smallest eigenvalue is at least -tol * trace / n (the scale
// falls back to 1 when the trace is not positive).
PsdReport psd_check(const GramMatrix& gram, double tol = 1e-8);

// k*(i,j) = k(i,j) / sqrt(k(i,i) k(j,j)). A zero self-similarity yields 0.
double normalize_kernel(double raw, double self1, double self2);

// Cosine-normalizes every entry; rows with zero self-similarity get 1 on the
// diagonal and 0 elsewhere.
GramMatrix normalize_gram(const GramMatrix& gram);

}  // namespace sbr::kernels
