#include "sbr/eval/metrics.hpp"

#include <stdexcept>

namespace sbr::eval {

PredictionSet::PredictionSet(std::vector<std::string> examples, std::vector<std::string> predicates)
    : examples_(std::move(examples)), predicates_(std::move(predicates)) {
  const std::size_t cells = examples_.size() * predicates_.size();
  truth_.assign(cells, 0);
  predicted_.assign(cells, 0);
  undecided_.assign(cells, 0);
  score_.assign(cells, 0.0);
}

std::size_t PredictionSet::cell(std::size_t i, std::size_t j) const {
  if (i >= examples_.size() || j >= predicates_.size()) throw std::out_of_range("prediction cell out of range");
  return i * predicates_.size() + j;
}

void PredictionSet::set(std::size_t i, std::size_t j, bool truth, bool predicted, bool undecided, double score) {
  const auto c = cell(i, j);
  truth_[c] = truth;
  predicted_[c] = predicted;
  undecided_[c] = undecided;
  score_[c] = score;
}

namespace {

bool counts(const PredictionSet& p, std::size_t i, std::size_t j, Filter f) {
  return f == Filter::raw || !p.undecided(i, j);
}

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

std::vector<Confusion> confusion(const PredictionSet& preds, Filter filter) {
  std::vector<Confusion> out(preds.predicates());
  for (std::size_t i = 0; i < preds.examples(); ++i)
    for (std::size_t j = 0; j < preds.predicates(); ++j) {
      if (!counts(preds, i, j, filter)) continue;
      const bool y = preds.truth(i, j), z = preds.predicted(i, j);
      auto& c = out[j];
      if (y && z) ++c.tp;
      else if (!y && z) ++c.fp;
      else if (y && !z) ++c.fn;
      else ++c.tn;
    }
  return out;
}

ExampleMetrics example_metrics(const PredictionSet& preds, Filter filter) {
  ExampleMetrics m;
  const std::size_t n = preds.examples();
  if (n == 0) throw std::invalid_argument("example metrics need at least one example");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t y = 0, z = 0, both = 0;
    for (std::size_t j = 0; j < preds.predicates(); ++j) {
      if (!counts(preds, i, j, filter)) continue;
      y += preds.truth(i, j);
      z += preds.predicted(i, j);
      both += preds.truth(i, j) && preds.predicted(i, j);
    }
    m.precision += ratio(both, z);
    m.recall += ratio(both, y);
    m.f1 += y + z == 0 ? 1.0 : 2.0 * both / static_cast<double>(y + z);
    m.exact_match += both == y && both == z;
  }
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.exact_match /= n;
  return m;
}

LabelMetrics label_metrics(const Confusion& c) {
  return {ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn), ratio(2.0 * c.tp, 2.0 * c.tp + c.fp + c.fn)};
}

LabelMetrics label_metrics(const PredictionSet& preds, Average average, Filter filter) {
  const auto per = confusion(preds, filter);
  if (per.empty()) throw std::invalid_argument("label metrics need at least one predicate");
  if (average == Average::micro) {
    Confusion pooled;
    for (const auto& c : per) {
      pooled.tp += c.tp;
      pooled.fp += c.fp;
      pooled.fn += c.fn;
      pooled.tn += c.tn;
    }
    return label_metrics(pooled);
  }
  LabelMetrics m;
  for (const auto& c : per) {
    const auto one = label_metrics(c);
    m.precision += one.precision;
    m.recall += one.recall;
    m.f1 += one.f1;
  }
  const double k = static_cast<double>(per.size());
  return {m.precision / k, m.recall / k, m.f1 / k};
}

double consistency(const PredictionSet& preds, const ontology::GoCut& cut, Filter filter) {
  const std::size_t k = preds.predicates();
  if (preds.examples() == 0) throw std::invalid_argument("consistency needs at least one example");
  // Column of every cut node that is a predicate of the set, or k.
  std::vector<std::size_t> column(cut.size(), k);
  std::vector<std::size_t> node_of(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& name = preds.predicate_names()[j];
    if (!cut.has_predicate(name)) throw std::invalid_argument("predicate " + name + " is not in the cut");
    node_of[j] = cut.index_of_predicate(name);
    if (cut.node(node_of[j]).bin) throw std::invalid_argument("bin node " + name + " in a prediction set");
    column[node_of[j]] = j;
  }
  double total = 0;
  for (std::size_t i = 0; i < preds.examples(); ++i) {
    auto on = [&](std::size_t j) { return preds.predicted(i, j) && counts(preds, i, j, filter); };
    double sum = 0;
    std::size_t predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (!on(j)) continue;
      ++predicted;
      const auto& node = cut.node(node_of[j]);
      if (node.level <= 1 || node.parents.empty()) {
        sum += 1;
        continue;
      }
      std::size_t hit = 0;
      for (std::size_t p : node.parents) hit += column[p] < k && on(column[p]);
      sum += static_cast<double>(hit) / static_cast<double>(node.parents.size());
    }
    total += predicted == 0 ? 1.0 : sum / static_cast<double>(predicted);
  }
  return total / static_cast<double>(preds.examples());
}

}  // namespace sbr::eval
