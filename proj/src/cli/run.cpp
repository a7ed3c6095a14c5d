#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "sbr/cli/pipeline.hpp"
#include "sbr/eval/curves.hpp"
#include "sbr/eval/metrics.hpp"
#include "sbr/io/text.hpp"
#include "sbr/kernels/io.hpp"
#include "sbr/learner/model_io.hpp"
#include "sbr/learner/train.hpp"
#include "sbr/ontology/rules.hpp"

namespace sbr::cli {

namespace {

using PairKey = std::pair<std::string, std::string>;

PairKey pair_key(const std::string& a, const std::string& b) { return a < b ? PairKey{a, b} : PairKey{b, a}; }

std::string fmt6(double x) { return io::format_double(x, "%.6f"); }

// Learned-BOUND inputs: the pair Gram restricted to kept proteins.
struct PairData {
  std::shared_ptr<const kernels::GramMatrix> gram;
  std::vector<PairKey> pairs;        // per expansion row
  std::map<PairKey, std::size_t> row;
};

PairData load_pairs(const ExperimentConfig& c, const Dataset& d) {
  const auto full = kernels::read_gram_csv(*c.pair_gram);
  const std::set<std::string> kept(d.proteins.begin(), d.proteins.end());
  PairData p;
  std::vector<std::string> ids;
  for (const auto& id : full.ids()) {
    const auto bar = id.find('|');
    if (bar == std::string::npos) throw io::IoError("pair Gram id '" + id + "' is not of the form a|b");
    const auto a = id.substr(0, bar), b = id.substr(bar + 1);
    if (!kept.count(a) || !kept.count(b)) continue;
    const auto key = pair_key(a, b);
    if (p.row.count(key)) throw io::IoError("pair Gram lists " + key.first + "|" + key.second + " twice");
    p.row.emplace(key, ids.size());
    p.pairs.push_back(key);
    ids.push_back(id);
  }
  if (ids.empty()) throw ConfigError("the pair Gram has no pair of kept proteins");
  p.gram = std::make_shared<const kernels::GramMatrix>(full.submatrix(ids));
  return p;
}

struct Shared {
  const ExperimentConfig& config;
  const Dataset& data;
  std::shared_ptr<const kernels::GramMatrix> gram;
  const RuleBundle& rules;
  const eval::Folds& folds;
  const PairData* pairs = nullptr;
  std::set<PairKey> ppi;
  std::map<std::string, std::size_t> row;  // protein -> Gram row
};

struct BoundPrediction {
  PairKey pair;
  bool truth = false;
  double value = 0;
  bool positive = false, undecided = false;
};

struct FoldOutcome {
  bool ok = false;
  std::string error;
  std::vector<std::string> test;                    // sorted
  std::vector<std::vector<double>> truth;           // [test protein][cut node]
  std::vector<std::vector<char>> positive, undecided;
  std::vector<BoundPrediction> bound;
};

learner::TaskSpec unary_task(const Shared& s, const ontology::CutNode& node, const std::vector<bool>& labeled,
                             const std::vector<std::size_t>& domain) {
  learner::TaskSpec t;
  t.predicate = node.predicate;
  t.gram = s.gram;
  t.labeled = labeled;
  t.targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.data.proteins.size()));
  for (std::size_t i = 0; i < s.data.proteins.size(); ++i)
    if (node.proteins.count(s.data.proteins[i])) t.targets(static_cast<Eigen::Index>(i)) = 1.0;
  t.table_index = domain;
  return t;
}

FoldOutcome run_fold(const Shared& s, std::size_t f, const std::filesystem::path& dir) {
  FoldOutcome out;
  const auto& proteins = s.data.proteins;
  const std::set<std::string> test(s.folds[f].begin(), s.folds[f].end());
  out.test.assign(test.begin(), test.end());

  std::vector<bool> labeled(proteins.size());
  std::vector<std::size_t> domain;
  std::size_t training = 0;
  for (std::size_t i = 0; i < proteins.size(); ++i) {
    labeled[i] = !test.count(proteins[i]);
    training += labeled[i];
    if (s.config.constrain_all || !labeled[i]) domain.push_back(i);
  }
  if (training + test.size() != proteins.size()) throw std::logic_error("fold " + std::to_string(f) + " overlaps its training set");

  std::vector<learner::TaskSpec> tasks;
  for (const auto& node : s.data.cut.nodes()) tasks.push_back(unary_task(s, node, labeled, domain));
  const std::size_t nd = domain.size();
  if (s.rules.uses_bound) {
    learner::TaskSpec b;
    b.predicate = std::string(ontology::kBoundPredicate);
    b.arity = 2;
    if (!s.rules.bound_learned) {
      b.mode = logic::BindingMode::given;
      b.given_values.assign(nd * nd, 0.0);
      for (std::size_t x = 0; x < nd; ++x)
        for (std::size_t y = 0; y < nd; ++y)
          if (x != y && s.ppi.count(pair_key(proteins[domain[x]], proteins[domain[y]]))) b.given_values[x * nd + y] = 1.0;
    } else {
      const auto& p = *s.pairs;
      b.gram = p.gram;
      b.labeled.resize(p.pairs.size());
      b.targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.pairs.size()));
      for (std::size_t r = 0; r < p.pairs.size(); ++r) {
        b.labeled[r] = !test.count(p.pairs[r].first) && !test.count(p.pairs[r].second);
        if (s.ppi.count(p.pairs[r])) b.targets(static_cast<Eigen::Index>(r)) = 1.0;
      }
      b.table_index.assign(nd * nd, learner::kUnmapped);
      for (std::size_t x = 0; x < nd; ++x)
        for (std::size_t y = 0; y < nd; ++y) {
          const auto it = p.row.find(pair_key(proteins[domain[x]], proteins[domain[y]]));
          if (x != y && it != p.row.end()) b.table_index[x * nd + y] = it->second;
        }
    }
    tasks.push_back(std::move(b));
  }

  const auto& tc = s.config.train;
  const auto problem = learner::build_problem(std::move(tasks), nd, s.rules.rules, tc.tnorm, tc.implication);
  learner::Model model;
  try {
    model = learner::train(problem, tc);
  } catch (const learner::TrainingDiverged& e) {
    out.error = e.what();
    io::write_file_atomic(dir / "error.txt", out.error + "\n");
    return out;
  }
  if (!model.stage1_converged || !model.stage2_converged) {
    spdlog::warn("fold {}: training stopped before convergence (stage 1: {}, stage 2: {})", f, model.stage1_converged,
                 model.stage2_converged);
  }
  const auto preds = learner::predict(model, problem, tc);

  const auto& cut = s.data.cut;
  std::string tsv;
  for (const auto& protein : out.test) {
    const std::size_t r = s.row.at(protein);
    std::vector<double> truth;
    std::vector<char> pos, und;
    for (std::size_t k = 0; k < cut.size(); ++k) {
      const auto& p = preds[k];
      truth.push_back(p.truth[r]);
      pos.push_back(p.positive[r]);
      und.push_back(p.undecided[r]);
      tsv += protein + "\t" + cut.node(k).predicate + "\t" + fmt6(p.truth[r]) + "\t" + (p.positive[r] ? "pos" : "neg") +
             "\t" + (p.undecided[r] ? "1" : "0") + "\n";
    }
    out.truth.push_back(std::move(truth));
    out.positive.push_back(std::move(pos));
    out.undecided.push_back(std::move(und));
  }
  io::write_file_atomic(dir / "predictions.tsv", tsv);

  if (s.rules.bound_learned) {
    const auto& p = preds.back();
    std::string btsv;
    for (std::size_t r = 0; r < s.pairs->pairs.size(); ++r) {
      const auto& key = s.pairs->pairs[r];
      if (!test.count(key.first) || !test.count(key.second)) continue;
      out.bound.push_back({key, s.ppi.count(key) != 0, p.truth[r], p.positive[r], p.undecided[r]});
      btsv += key.first + "\t" + key.second + "\t" + fmt6(p.truth[r]) + "\t" + (p.positive[r] ? "pos" : "neg") + "\t" +
              (p.undecided[r] ? "1" : "0") + "\n";
    }
    io::write_file_atomic(dir / "bound_predictions.tsv", btsv);
  }
  learner::save_model(dir / "model.json", model, tc);
  out.ok = true;
  return out;
}

void add_metrics(std::vector<std::pair<std::string, double>>& m, const std::string& prefix,
                 const eval::PredictionSet& set, const ontology::GoCut& cut, eval::Filter filter) {
  const auto ex = eval::example_metrics(set, filter);
  m.emplace_back(prefix + "example_precision", ex.precision);
  m.emplace_back(prefix + "example_recall", ex.recall);
  m.emplace_back(prefix + "example_f1", ex.f1);
  m.emplace_back(prefix + "exact_match", ex.exact_match);
  for (auto [avg, name] : {std::pair{eval::Average::micro, "micro"}, std::pair{eval::Average::macro, "macro"}}) {
    const auto l = eval::label_metrics(set, avg, filter);
    m.emplace_back(prefix + name + "_precision", l.precision);
    m.emplace_back(prefix + name + "_recall", l.recall);
    m.emplace_back(prefix + name + "_f1", l.f1);
  }
  m.emplace_back(prefix + "consistency", eval::consistency(set, cut, filter));
}

void aggregate(const Shared& s, const std::vector<FoldOutcome>& outcomes, const std::filesystem::path& out) {
  const auto& cut = s.data.cut;
  std::vector<std::string> examples;
  std::vector<std::pair<std::size_t, std::size_t>> source;  // (fold, row in fold)
  for (std::size_t f = 0; f < outcomes.size(); ++f)
    for (std::size_t i = 0; i < outcomes[f].test.size(); ++i) {
      examples.push_back(outcomes[f].test[i]);
      source.emplace_back(f, i);
    }
  std::vector<std::size_t> headline;  // non-bin cut nodes
  std::vector<std::string> all_names, headline_names;
  for (std::size_t k = 0; k < cut.size(); ++k) {
    all_names.push_back(cut.node(k).predicate);
    if (!cut.node(k).bin) {
      headline.push_back(k);
      headline_names.push_back(cut.node(k).predicate);
    }
  }
  if (headline.empty()) throw std::runtime_error("the cut has no non-bin predicate to evaluate");
  eval::PredictionSet all(examples, all_names), head(examples, headline_names);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& o = outcomes[source[i].first];
    const std::size_t r = source[i].second;
    for (std::size_t k = 0; k < cut.size(); ++k) {
      const bool y = cut.node(k).proteins.count(examples[i]) != 0;
      all.set(i, k, y, o.positive[r][k], o.undecided[r][k], o.truth[r][k]);
    }
    for (std::size_t j = 0; j < headline.size(); ++j) {
      const auto k = headline[j];
      head.set(i, j, all.truth(i, k), all.predicted(i, k), all.undecided(i, k), all.score(i, k));
    }
  }

  std::vector<std::pair<std::string, double>> m;
  m.emplace_back("folds", static_cast<double>(outcomes.size()));
  m.emplace_back("examples", static_cast<double>(examples.size()));
  m.emplace_back("predicates", static_cast<double>(headline.size()));
  add_metrics(m, "", head, cut, eval::Filter::raw);
  add_metrics(m, "filtered_", head, cut, eval::Filter::decided);

  // Curves: one per headline predicate with a positive example, macro-averaged;
  // and one over all pooled cells.
  std::vector<eval::PrCurve> curves;
  std::vector<double> pooled_scores;
  std::vector<char> pooled_labels;
  for (std::size_t j = 0; j < headline.size(); ++j) {
    std::vector<double> sc;
    std::unique_ptr<bool[]> lab(new bool[examples.size()]);
    bool any = false;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      sc.push_back(head.score(i, j));
      lab[i] = head.truth(i, j);
      any = any || lab[i];
      pooled_scores.push_back(sc.back());
      pooled_labels.push_back(lab[i]);
    }
    if (any) curves.push_back(eval::pr_curve(sc, std::span<const bool>(lab.get(), examples.size())));
  }
  m.emplace_back("curve_predicates", static_cast<double>(curves.size()));
  if (!curves.empty()) {
    const auto macro = eval::average_pr_curves(curves, s.config.curve_samples);
    std::unique_ptr<bool[]> lab(new bool[pooled_labels.size()]);
    for (std::size_t i = 0; i < pooled_labels.size(); ++i) lab[i] = pooled_labels[i];
    const auto micro = eval::pr_curve(pooled_scores, std::span<const bool>(lab.get(), pooled_labels.size()));
    m.emplace_back("auc_macro_pr", eval::auc_pr(macro));
    m.emplace_back("auc_micro_pr", eval::auc_pr(micro));
    io::write_file_atomic(out / "curves" / "macro_pr.csv", eval::format_curve_csv(macro));
    io::write_file_atomic(out / "curves" / "micro_pr.csv", eval::format_curve_csv(micro));
  }

  if (s.rules.bound_learned) {
    eval::Confusion c;
    for (const auto& o : outcomes)
      for (const auto& b : o.bound) {
        if (b.truth && b.positive) ++c.tp;
        else if (!b.truth && b.positive) ++c.fp;
        else if (b.truth) ++c.fn;
        else ++c.tn;
      }
    const auto l = eval::label_metrics(c);
    m.emplace_back("bound_pairs", static_cast<double>(c.tp + c.fp + c.fn + c.tn));
    m.emplace_back("bound_precision", l.precision);
    m.emplace_back("bound_recall", l.recall);
    m.emplace_back("bound_f1", l.f1);
  }

  std::string report;
  for (const auto& [k, v] : m) {
    const bool count = k == "folds" || k == "examples" || k == "predicates" || k == "curve_predicates" || k == "bound_pairs";
    report += k + " = " + (count ? std::to_string(static_cast<std::size_t>(v)) : fmt6(v)) + "\n";
  }
  io::write_file_atomic(out / "metrics.txt", report);

  const auto per = eval::confusion(all);
  std::string stats = "id\tpredicate\tname\tlevel\tbin\tpositives\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\n";
  for (std::size_t k = 0; k < cut.size(); ++k) {
    const auto& n = cut.node(k);
    const auto& c = per[k];
    const auto l = eval::label_metrics(c);
    stats += n.id + "\t" + n.predicate + "\t" + n.name + "\t" + std::to_string(n.level) + "\t" + (n.bin ? "1" : "0") +
             "\t" + std::to_string(c.tp + c.fn) + "\t" + std::to_string(c.tp) + "\t" + std::to_string(c.fp) + "\t" +
             std::to_string(c.fn) + "\t" + std::to_string(c.tn) + "\t" + fmt6(l.precision) + "\t" + fmt6(l.recall) +
             "\t" + fmt6(l.f1) + "\n";
  }
  io::write_file_atomic(out / "node_stats.tsv", stats);
  io::write_file_atomic(out / "result_tree.dot", result_tree_dot(cut.nodes(), stats));
}

}  // namespace

RunResult cmd_run(const ExperimentConfig& c, const std::filesystem::path& out, const RunOptions& o) {
  const auto data = load_dataset(c);
  const std::size_t jobs = std::max<std::size_t>(1, std::min(o.jobs.value_or(c.jobs ? c.jobs : c.folds), c.folds));
  const auto gram = std::make_shared<const kernels::GramMatrix>(protein_gram(c, data, jobs));
  const auto rules = build_rules(c, data);
  const auto folds = make_folds(c, data, o.seed.value_or(c.seed));

  ExperimentConfig echo = c;
  echo.seed = o.seed.value_or(c.seed);
  io::write_file_atomic(out / "config.txt", format_config(echo));
  io::write_file_atomic(out / "cut.tsv", ontology::format_cut_tsv(data.cut));
  std::string rule_text;
  for (const auto& r : rules.rules) rule_text += logic::to_string(r) + "\n";
  io::write_file_atomic(out / "rules.txt", rule_text);
  io::write_file_atomic(out / "folds.tsv", eval::format_folds_tsv(folds));

  Shared s{c, data, gram, rules, folds, nullptr, {}, {}};
  for (std::size_t i = 0; i < data.proteins.size(); ++i) s.row.emplace(data.proteins[i], i);
  for (const auto& [a, b] : data.ppi) s.ppi.insert(pair_key(a, b));
  std::optional<PairData> pairs;
  if (rules.bound_learned) {
    pairs = load_pairs(c, data);
    s.pairs = &*pairs;
  }

  spdlog::info("running {} folds on {} worker(s): {} proteins, {} predicates, {} rules", folds.size(), jobs,
               data.proteins.size(), data.cut.size(), rules.rules.size());
  std::vector<FoldOutcome> outcomes(folds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < folds.size(); f = next++) {
      const auto dir = out / ("fold_" + std::to_string(f));
      std::filesystem::remove(dir / "error.txt");
      try {
        outcomes[f] = run_fold(s, f, dir);
      } catch (const std::exception& e) {
        outcomes[f].error = e.what();
        io::write_file_atomic(dir / "error.txt", outcomes[f].error + "\n");
      }
      spdlog::info("fold {} {}", f, outcomes[f].ok ? "done" : "failed: " + outcomes[f].error);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunResult result;
  for (std::size_t f = 0; f < outcomes.size(); ++f)
    if (!outcomes[f].ok) result.failures.push_back("fold " + std::to_string(f) + ": " + outcomes[f].error);
  result.ok = result.failures.empty();
  if (!result.ok) {
    spdlog::error("{} fold(s) failed; aggregate outputs were not written", result.failures.size());
    return result;
  }
  aggregate(s, outcomes, out);
  return result;
}

}  // namespace sbr::cli
