#include "sbr/eval/curves.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sbr/io/text.hpp"

namespace sbr::eval {

PrCurve pr_curve(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0) throw std::invalid_argument("precision-recall curve without positive labels");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  PrCurve curve;
  std::size_t tp = 0, taken = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      tp += labels[order[i]];
      ++taken;
    }
    const PrPoint p{static_cast<double>(tp) / positives, static_cast<double>(tp) / taken};
    if (curve.empty()) curve.push_back({0.0, p.precision});
    curve.push_back(p);
  }
  return curve;
}

namespace {

// Distinct recalls, each with its best precision.
PrCurve collapse(const PrCurve& curve) {
  PrCurve out;
  for (const auto& p : curve) {
    if (!out.empty() && out.back().recall == p.recall) {
      out.back().precision = std::max(out.back().precision, p.precision);
    } else {
      if (!out.empty() && p.recall < out.back().recall) throw std::invalid_argument("curve recall decreases");
      out.push_back(p);
    }
  }
  return out;
}

double interpolate_collapsed(const PrCurve& c, double r) {
  if (r <= c.front().recall) return c.front().precision;
  if (r >= c.back().recall) return c.back().precision;
  // First point with recall > r; its predecessor has recall <= r.
  const auto hi = std::upper_bound(c.begin(), c.end(), r, [](double v, const PrPoint& p) { return v < p.recall; });
  const auto lo = hi - 1;
  const double t = (r - lo->recall) / (hi->recall - lo->recall);
  return lo->precision + t * (hi->precision - lo->precision);
}

}  // namespace

double interpolate_precision(const PrCurve& curve, double recall) {
  if (curve.empty()) throw std::invalid_argument("interpolating an empty curve");
  return interpolate_collapsed(collapse(curve), recall);
}

PrCurve average_pr_curves(std::span<const PrCurve> curves, std::size_t n_samples) {
  if (curves.empty()) throw std::invalid_argument("averaging no curves");
  if (n_samples == 0) throw std::invalid_argument("averaging needs at least one sample");
  std::vector<PrCurve> collapsed;
  for (const auto& c : curves) {
    if (c.empty()) throw std::invalid_argument("averaging an empty curve");
    collapsed.push_back(collapse(c));
  }
  PrCurve out;
  for (std::size_t i = 0; i <= n_samples; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(n_samples);
    double sum = 0;
    for (const auto& c : collapsed) sum += interpolate_collapsed(c, r);
    out.push_back({r, sum / static_cast<double>(collapsed.size())});
  }
  return out;
}

double auc_pr(const PrCurve& curve) {
  double area = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].recall - curve[i - 1].recall) * (curve[i].precision + curve[i - 1].precision) / 2;
  return area;
}

std::string format_curve_csv(const PrCurve& curve) {
  std::string out = "recall,precision\n";
  for (const auto& p : curve) out += io::format_double(p.recall) + "," + io::format_double(p.precision) + "\n";
  return out;
}

PrCurve parse_curve_csv(std::string_view text) {
  PrCurve curve;
  for (const auto& [line_no, line] : io::content_lines(text)) {
    if (line.rfind("recall", 0) == 0) continue;
    const auto f = io::split(line, ',');
    if (f.size() != 2) throw io::IoError("curve line " + std::to_string(line_no) + ": expected 2 fields");
    try {
      curve.push_back({std::stod(f[0]), std::stod(f[1])});
    } catch (const std::exception&) {
      throw io::IoError("curve line " + std::to_string(line_no) + ": not a number");
    }
  }
  return curve;
}

}  // namespace sbr::eval
