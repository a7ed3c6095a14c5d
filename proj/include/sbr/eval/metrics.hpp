#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sbr/ontology/cut.hpp"

namespace sbr::eval {

// Dense n × k table of ground truth, predicted labels, undecided flags and
// scores; row-major, one row per example. Callers leave bin nodes and BOUND
// out of the predicate list.
class PredictionSet {
 public:
  PredictionSet() = default;
  PredictionSet(std::vector<std::string> examples, std::vector<std::string> predicates);

  std::size_t examples() const { return examples_.size(); }
  std::size_t predicates() const { return predicates_.size(); }
  const std::vector<std::string>& example_ids() const { return examples_; }
  const std::vector<std::string>& predicate_names() const { return predicates_; }

  void set(std::size_t i, std::size_t j, bool truth, bool predicted, bool undecided, double score);
  bool truth(std::size_t i, std::size_t j) const { return truth_[cell(i, j)] != 0; }
  bool predicted(std::size_t i, std::size_t j) const { return predicted_[cell(i, j)] != 0; }
  bool undecided(std::size_t i, std::size_t j) const { return undecided_[cell(i, j)] != 0; }
  double score(std::size_t i, std::size_t j) const { return score_[cell(i, j)]; }

 private:
  std::size_t cell(std::size_t i, std::size_t j) const;

  std::vector<std::string> examples_;
  std::vector<std::string> predicates_;
  std::vector<std::uint8_t> truth_, predicted_, undecided_;
  std::vector<double> score_;
};

// raw: every cell counts. decided: undecided cells are left out, as if the
// predicate were not part of that example's label space.
enum class Filter { raw, decided };

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

std::vector<Confusion> confusion(const PredictionSet& preds, Filter filter = Filter::raw);

struct ExampleMetrics {
  double precision = 0, recall = 0, f1 = 0, exact_match = 0;
};

// Averages over examples. Empty predicted set: precision term 0. Empty truth
// set: recall term 0. Both empty: F1 term 1.
ExampleMetrics example_metrics(const PredictionSet& preds, Filter filter = Filter::raw);

enum class Average { micro, macro };

struct LabelMetrics {
  double precision = 0, recall = 0, f1 = 0;
};

// Zero denominators give 0.
LabelMetrics label_metrics(const PredictionSet& preds, Average average, Filter filter = Filter::raw);
LabelMetrics label_metrics(const Confusion& c);

// Mean over examples of the fraction of each predicted term's retained
// parents that are predicted too. Roots, level-1 terms and terms without a
// parent in the cut count 1; an example with no predictions counts 1.
// Predicates must be non-bin cut nodes.
double consistency(const PredictionSet& preds, const ontology::GoCut& cut, Filter filter = Filter::raw);

}  // namespace sbr::eval
