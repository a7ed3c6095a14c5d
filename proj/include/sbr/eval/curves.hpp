#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbr::eval {

struct PrPoint {
  double recall = 0;
  double precision = 0;
  bool operator==(const PrPoint&) const = default;
};

// Points in order of non-decreasing recall.
using PrCurve = std::vector<PrPoint>;

// Sweeps a threshold down through every distinct score; a point is emitted
// per threshold, preceded by a recall-0 point carrying the precision of the
// top-scored group. Throws std::invalid_argument without positive labels.
PrCurve pr_curve(std::span<const double> scores, std::span<const bool> labels);

// Precision of the curve at `recall`: linear between the recall neighbours,
// constant beyond the ends. Points sharing a recall collapse to their best
// precision first.
double interpolate_precision(const PrCurve& curve, double recall);

// Mean of the interpolated precisions at recall i / n_samples, i = 0..n_samples.
PrCurve average_pr_curves(std::span<const PrCurve> curves, std::size_t n_samples = 100);

// Trapezoidal area under the curve; 0 for fewer than two points.
double auc_pr(const PrCurve& curve);

// CSV with a `recall,precision` header.
std::string format_curve_csv(const PrCurve& curve);
PrCurve parse_curve_csv(std::string_view text);

}  // namespace sbr::eval
