// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "../synthetic_hierarchy.hpp"
#include "../unit/random_dag.hpp"
#include "sbr/cli/config.hpp"
#include "sbr/cli/pipeline.hpp"
#include "sbr/eval/curves.hpp"
#include "sbr/eval/folds.hpp"
#include "sbr/eval/metrics.hpp"
#include "sbr/io/text.hpp"
#include "sbr/kernels/build.hpp"
#include "sbr/kernels/functions.hpp"
#include "sbr/kernels/gram.hpp"
#include "sbr/learner/problem.hpp"
#include "sbr/learner/train.hpp"
#include "sbr/logic/constraint.hpp"
#include "sbr/logic/parser.hpp"
#include "sbr/logic/tnorm.hpp"
#include "sbr/ontology/cut.hpp"
#include "sbr/ontology/dag.hpp"
#include "sbr/ontology/rules.hpp"

namespace fs = std::filesystem;
using namespace sbr;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (problems.size() < 5) problems.push_back(what);
    }
  }
};

std::string fmt(double x, const char* f = "%.3g") { return io::format_double(x, f); }

constexpr logic::TNormKind kKinds[] = {logic::TNormKind::minimum, logic::TNormKind::product,
                                        logic::TNormKind::lukasiewicz};

// ---------------------------------------------------------------- 1

Outcome truth_tables() {
  using logic::NodeKind;
  Outcome o;
  logic::Signature sig;
  sig.declare_domain("Prot", 1);
  sig.declare_predicate({"A", {"Prot"}});
  sig.declare_predicate({"B", {"Prot"}});
  const std::pair<const char*, std::function<bool(bool, bool)>> connectives[] = {
      {"A(x) and B(x)", [](bool a, bool b) { return a && b; }},
      {"A(x) or B(x)", [](bool a, bool b) { return a || b; }},
      {"A(x) => B(x)", [](bool a, bool b) { return !a || b; }},
      {"A(x) <=> B(x)", [](bool a, bool b) { return a == b; }},
      {"not A(x)", [](bool a, bool) { return !a; }},
  };
  std::size_t cells = 0;
  for (auto kind : kKinds)
    for (auto mode : {logic::ImplicationMode::residuum, logic::ImplicationMode::material})
      for (const auto& [body, oracle] : connectives) {
        const auto c = logic::compile(logic::parse_rule(std::string("forall x:Prot. ") + body), kind, sig, mode);
        for (int a = 0; a <= 1; ++a)
          for (int b = 0; b <= 1; ++b) {
            const logic::PredicateValues v{{double(a)}, {double(b)}};
            const double got = c.truths(v).front();
            o.require(got == double(oracle(a, b)), std::string(logic::to_string(kind)) + " " + body + " at (" +
                                                       std::to_string(a) + "," + std::to_string(b) + ")");
            ++cells;
          }
      }

  // Residua on the 0.05 grid, directly and through a compiled implication.
  double worst = 0;
  for (auto kind : kKinds) {
    const auto c = logic::compile(logic::parse_rule("forall x:Prot. A(x) => B(x)"), kind, sig);
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        const double a = i * 0.05, b = j * 0.05;
        double want = 0;
        switch (kind) {
          case logic::TNormKind::minimum: want = a <= b ? 1.0 : b; break;
          case logic::TNormKind::product: want = a <= b ? 1.0 : b / a; break;
          case logic::TNormKind::lukasiewicz: want = std::min(1.0, 1.0 - a + b); break;
        }
        const double direct = logic::residuum(kind, a, b);
        const double compiled = c.truths({{a}, {b}}).front();
        worst = std::max({worst, std::abs(direct - want), std::abs(compiled - want)});
      }
  }
  o.require(worst <= 1e-12, "residuum grid error " + fmt(worst));
  o.detail = std::to_string(cells) + " endpoint cells exact, residuum grid max error " + fmt(worst);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome quantifier_identities() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 16;
    logic::Signature sig;
    sig.declare_domain("Prot", n);
    sig.declare_predicate({"A", {"Prot"}});
    sig.declare_predicate({"B", {"Prot"}});
    auto v = sig.make_values();
    for (auto& t : v)
      for (double& x : t) x = trial % 4 == 0 ? double(rng() % 2) : u(rng);
    const auto kind = kKinds[trial % 3];
    const std::string body = trial % 2 ? "A(x) => B(x)" : "A(x) and not B(x)";
    auto penalty = [&](const std::string& q) {
      return logic::compile(logic::parse_rule(q + " x:Prot. " + body), kind, sig).penalty(v);
    };
    const double e = penalty("exists"), e1 = penalty("exists[1]");
    const double all = penalty("forall"), en = penalty("exists[" + std::to_string(n) + "]");
    o.require(e == e1, "exists vs exists[1] at trial " + std::to_string(trial));
    o.require(all == en, "forall vs exists[|S|] at trial " + std::to_string(trial));

    std::vector<double> t(n);
    for (double& x : t) x = u(rng);
    o.require(logic::aggregate_quantifier(logic::QuantifierKind::exists_n, t, 1) ==
                  logic::aggregate_quantifier(logic::QuantifierKind::exists, t),
              "aggregate exists[1]");
    o.require(logic::aggregate_quantifier(logic::QuantifierKind::exists_n, t, n) ==
                  logic::aggregate_quantifier(logic::QuantifierKind::forall, t),
              "aggregate exists[|S|]");
  }
  o.detail = "1000 instances, compiled and direct aggregation, bit-exact";
  return o;
}

// ---------------------------------------------------------------- 3

std::shared_ptr<const kernels::GramMatrix> gram_of(const Eigen::MatrixXd& m) {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < m.rows(); ++i) ids.push_back("e" + std::to_string(i));
  const Eigen::MatrixXd sym = (m + m.transpose()) / 2;
  return std::make_shared<const kernels::GramMatrix>(ids, sym);
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return scale(rng) * a * a.transpose() / static_cast<double>(n);
}

Outcome gradients() {
  Outcome o;
  constexpr double kMargin = 1e-3, kTol = 1e-5;

  // Constraint penalties over random truth tables.
  const char* rules[] = {
      "forall x:Prot. A(x) => B(x)",
      "forall x:Prot. A(x) => (B(x) or C(x))",
      "forall x:Prot. forall y:Prot. R(x,y) => (A(x) <=> A(y))",
      "forall x:Prot. forall y:Prot. R(x,y) => ((A(x) and A(y)) or (B(x) and B(y)))",
      "exists x:Prot. A(x) and not C(x)",
      "exists[2] x:Prot. B(x) => C(x)",
      "forall x:Prot. exists y:Prot. R(x,y) and B(y)",
  };
  logic::Signature sig;
  sig.declare_domain("Prot", 4);
  for (const char* p : {"A", "B", "C"}) sig.declare_predicate({p, {"Prot"}});
  sig.declare_predicate({"R", {"Prot", "Prot"}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  double worst_penalty = 0;
  int penalty_instances = 0, skipped = 0;
  for (int trial = 0; penalty_instances < 200 && trial < 5000; ++trial) {
    const auto mode = trial % 5 == 4 ? logic::ImplicationMode::material : logic::ImplicationMode::residuum;
    const auto c = logic::compile(logic::parse_rule(rules[trial % 7]), kKinds[trial % 3], sig, mode);
    auto v = sig.make_values();
    for (auto& t : v)
      for (double& x : t) x = u(rng);
    if (c.kink_margin(v) < kMargin) {
      ++skipped;
      continue;
    }
    auto g = sig.make_values();
    c.accumulate_gradient(v, g);
    const double h = 1e-6;
    for (std::size_t s = 0; s < v.size(); ++s)
      for (std::size_t i = 0; i < v[s].size(); ++i) {
        auto up = v, down = v;
        up[s][i] += h;
        down[s][i] -= h;
        const double fd = (c.penalty(up) - c.penalty(down)) / (2 * h);
        const double err = std::abs(fd - g[s][i]) / std::max({std::abs(fd), std::abs(g[s][i]), kMargin});
        worst_penalty = std::max(worst_penalty, err);
      }
    ++penalty_instances;
  }
  o.require(penalty_instances == 200, "only " + std::to_string(penalty_instances) + " penalty instances");
  o.require(worst_penalty <= kTol, "penalty gradient error " + fmt(worst_penalty));

  // Full objective over three tasks with constraints on a transductive domain.
  const auto objective_rules = logic::parse_rules(
      "forall x:Prot. A(x) => B(x)\n"
      "forall x:Prot. B(x) => (A(x) or C(x))\n"
      "exists x:Prot. C(x) and not A(x)\n");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_objective = 0;
  int objective_instances = 0;
  for (int trial = 0; objective_instances < 200 && trial < 5000; ++trial) {
    const auto kind = kKinds[trial % 3];
    const Eigen::Index n = 6;
    std::vector<learner::TaskSpec> tasks;
    for (const char* name : {"A", "B", "C"}) {
      learner::TaskSpec t;
      t.predicate = name;
      t.gram = gram_of(random_psd(rng, n) + 0.5 * Eigen::MatrixXd::Identity(n, n));
      t.labeled = {true, true, true, false, false, false};
      t.targets = Eigen::VectorXd(n);
      for (auto& y : t.targets) y = unit(rng) < 0.5 ? 0.0 : 1.0;
      t.table_index = {3, 4, 5};
      tasks.push_back(std::move(t));
    }
    const auto p = learner::build_problem(tasks, 3, objective_rules, kind);
    auto w = learner::zero_weights(p);
    for (std::size_t k = 0; k < 3; ++k) {
      Eigen::VectorXd target(n);
      for (auto& v : target) v = 0.05 + 0.9 * unit(rng);
      w[k] = p.tasks[k].gram->matrix().ldlt().solve(target);
    }
    const double lr = 0.1 + 2 * unit(rng), lc = 0.5 + 5 * unit(rng);
    if (learner::objective_kink_margin(p, w, lc) < kMargin) {
      ++skipped;
      continue;
    }
    const auto grad = learner::objective_gradient(p, w, lr, lc);
    double gmax = 0, gram_max = 0;
    for (const auto& v : grad) gmax = std::max(gmax, v.cwiseAbs().maxCoeff());
    for (const auto& t : p.tasks) gram_max = std::max(gram_max, t.gram->matrix().cwiseAbs().maxCoeff());
    // Small enough that perturbed scores stay inside the smooth region.
    const double h = std::min(1e-6, 1e-4 / std::max(1.0, gram_max));
    for (std::size_t k = 0; k < 3; ++k)
      for (Eigen::Index i = 0; i < n; ++i) {
        auto plus = w, minus = w;
        plus[k](i) += h;
        minus[k](i) -= h;
        const double fd = (learner::objective(p, plus, lr, lc) - learner::objective(p, minus, lr, lc)) / (2 * h);
        const double an = grad[k](i);
        const double err = std::abs(fd - an) / std::max({std::abs(an), std::abs(fd), kMargin * std::max(1.0, gmax)});
        worst_objective = std::max(worst_objective, err);
      }
    ++objective_instances;
  }
  o.require(objective_instances == 200, "only " + std::to_string(objective_instances) + " objective instances");
  o.require(worst_objective <= kTol, "objective gradient error " + fmt(worst_objective));
  o.detail = "200 penalty + 200 objective instances (" + std::to_string(skipped) +
             " skipped near kinks); max rel error " + fmt(worst_penalty) + " / " + fmt(worst_objective);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome ridge_oracle() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lam(0.05, 5.0);
  std::bernoulli_distribution coin(0.5);
  double worst = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 10);
    learner::TaskSpec t;
    t.predicate = "A";
    t.gram = gram_of(random_psd(rng, n));
    t.labeled.assign(static_cast<std::size_t>(n), true);
    t.targets = Eigen::VectorXd(n);
    for (auto& y : t.targets) y = coin(rng) ? 1.0 : 0.0;
    if (t.targets.isZero(0)) t.targets(0) = 1;
    const auto p = learner::build_problem({t}, 0, {}, logic::TNormKind::product);
    learner::TrainConfig c;
    c.lambda_c = 0;
    c.lambda_r = lam(rng);
    const auto m = learner::train(p, c);
    const Eigen::MatrixXd& g = p.tasks[0].gram->matrix();
    const Eigen::VectorXd closed = (c.lambda_r * Eigen::MatrixXd::Identity(n, n) + g).ldlt().solve(t.targets);
    const double err = (m.alpha[0] - closed).norm() / closed.norm();
    worst = std::max(worst, err);
    o.require(err <= 1e-4, "trial " + std::to_string(trial) + " relative error " + fmt(err));
  }
  o.detail = std::to_string(trials) + " random PSD Grams, n <= 10, max relative error " + fmt(worst);
  return o;
}

// ---------------------------------------------------------------- 5

double naive_spectrum(const std::string& a, const std::string& b, std::size_t k) {
  if (a.size() < k || b.size() < k) return 0;
  double count = 0;
  for (std::size_t i = 0; i + k <= a.size(); ++i)
    for (std::size_t j = 0; j + k <= b.size(); ++j) count += a.compare(i, k, b, j, k) == 0;
  return count;
}

std::string random_string(std::mt19937_64& rng, std::size_t max_len, const std::string& alphabet) {
  std::string s(rng() % (max_len + 1), ' ');
  for (char& ch : s) ch = alphabet[rng() % alphabet.size()];
  return s;
}

std::vector<std::string> ids_of(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
  return ids;
}

Outcome kernel_oracles() {
  Outcome o;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string alphabet = trial % 3 == 0 ? "AB" : trial % 3 == 1 ? "ACGT" : "ACDEFGHIKLMNPQRSTVWY";
    const auto a = random_string(rng, 60, alphabet), b = random_string(rng, 60, alphabet);
    const std::size_t k = 1 + rng() % 6;
    o.require(kernels::spectrum_kernel(a, b, k) == naive_spectrum(a, b, k), "spectrum pair " + std::to_string(trial));
  }

  double identity_err = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    kernels::InteractionGraph g(ids_of(n));
    for (std::size_t e = 0; e < 2 * n; ++e) {
      const std::size_t x = rng() % n, y = rng() % n;
      if (x != y) g.add_edge("v" + std::to_string(x), "v" + std::to_string(y), 0.5 + (rng() % 4));
    }
    const auto k = kernels::diffusion_kernel(g, 0.0);
    identity_err = std::max(identity_err, (k.matrix() - Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n)))
                                              .cwiseAbs()
                                              .maxCoeff());
  }
  o.require(identity_err <= 1e-12, "beta = 0 deviates from I by " + fmt(identity_err));

  // Two vertices joined by an edge of weight w: exp(βH) has diagonal
  // (1 + e^{-2βw})/2 and off-diagonal (1 - e^{-2βw})/2.
  double pair_err = 0;
  for (double beta : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0})
    for (double w : {1.0, 0.3, 2.5}) {
      kernels::InteractionGraph g(ids_of(2));
      g.add_edge("v0", "v1", w);
      const auto k = kernels::diffusion_kernel(g, beta);
      const double d = (1 + std::exp(-2 * beta * w)) / 2, off = (1 - std::exp(-2 * beta * w)) / 2;
      pair_err = std::max({pair_err, std::abs(k(0, 0) - d), std::abs(k(1, 1) - d), std::abs(k(0, 1) - off),
                           std::abs(k(1, 0) - off)});
    }
  o.require(pair_err <= 1e-10, "two-vertex closed form error " + fmt(pair_err));

  int grams = 0;
  double min_eig = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    const auto ids = ids_of(n);
    kernels::FeatureStore f;
    std::normal_distribution<double> normal;
    for (const auto& id : ids) {
      f.sequences[id] = random_string(rng, 50, "ACDEFG");
      for (const char* d : {"IPR1", "IPR2", "IPR3", "IPR4", "IPR5", "IPR6"})
        if (rng() % 3 == 0) f.domains[id].insert(d);
      auto& x = f.expression[id];
      for (int t = 0; t < 8; ++t) x.push_back(normal(rng));
    }
    for (std::size_t e = 0; e < n; ++e) {
      const std::size_t a = rng() % n, b = rng() % n;
      if (a != b) f.interactions.push_back({ids[a], ids[b], 1.0});
    }
    for (auto kind : {kernels::KernelKind::spectrum, kernels::KernelKind::domain, kernels::KernelKind::diffusion,
                      kernels::KernelKind::correlation})
      for (bool normalize : {false, true}) {
        kernels::KernelSpec spec;
        spec.kind = kind;
        spec.k = 1 + rng() % 4;
        spec.beta = 0.1 + (rng() % 30) / 10.0;
        spec.normalize = normalize;
        const auto g = kernels::build_gram(spec, ids, f);
        const auto r = kernels::psd_check(g, 1e-8);
        min_eig = std::min(min_eig, r.min_eigenvalue);
        o.require(r.pass, std::string(kernels::to_string(kind)) + " Gram failed PSD (" + fmt(r.min_eigenvalue) + ")");
        ++grams;
      }
  }
  o.detail = "500 spectrum pairs exact; beta=0 max |K - I| " + fmt(identity_err) + "; two-vertex error " +
             fmt(pair_err) + "; " + std::to_string(grams) + " Grams PSD (min eigenvalue " + fmt(min_eig) + ")";
  return o;
}

// ---------------------------------------------------------------- 6

Outcome ontology_suite() {
  using namespace ontology;
  Outcome o;
  std::mt19937_64 rng(6);
  int cuts = 0, empty = 0, with_bins = 0, premises = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto g = ::testing::random_dag(rng, 2 + rng() % 29);
    const bool leaf_only = trial % 2 == 0;
    const auto closed = tpr_closure(::testing::random_annotations(rng, g.dag, 25, leaf_only), g.dag);
    const std::size_t l = rng() % 5, c = rng() % 8;

    // Membership by brute force over independently computed levels and counts.
    const auto levels = ::testing::relaxed_levels(g);
    std::set<std::string> expected;
    for (std::size_t t = 0; t < g.ids.size(); ++t) {
      std::size_t count = 0;
      for (const auto& [protein, terms] : closed) count += terms.count(g.ids[t]);
      if (levels[t] <= l && count >= c) expected.insert(g.ids[t]);
    }
    GoCut cut;
    try {
      cut = go_cut(g.dag, closed, {"biological_process"}, l, c);
    } catch (const DagError&) {
      o.require(expected.empty(), "go_cut threw on a non-empty cut");
      ++empty;
      continue;
    }
    std::set<std::string> got;
    for (const auto& n : cut.nodes())
      if (!n.bin) got.insert(n.id);
    o.require(got == expected, "cut membership differs at trial " + std::to_string(trial));
    ++cuts;

    // Rule counts: one implication per retained is_a link and per bin, one
    // disjunction per retained term with a retained child.
    auto retained = [&](std::size_t t) { return expected.count(g.ids[t]) != 0; };
    std::size_t links = 0, bins = 0, inner = 0;
    for (std::size_t t = 0; t < g.ids.size(); ++t) {
      if (!retained(t)) continue;
      bool kept = false, pruned = false;
      for (std::size_t p : g.dag.parents(t)) links += retained(p);
      for (std::size_t ch : g.dag.children(t)) (retained(ch) ? kept : pruned) = true;
      bins += kept && pruned;
      inner += kept;
    }
    with_bins += bins > 0;
    o.require(cut.bin_count() == bins, "bin count at trial " + std::to_string(trial));
    o.require(generate_oc_rules(cut).size() == links + bins + inner, "OC rule count at trial " + std::to_string(trial));

    // With leaf-only annotations every protein of an inner node is covered by
    // its children, bin included.
    if (leaf_only) {
      for (const auto& n : cut.nodes()) {
        if (n.children.empty()) continue;
        std::set<std::string> covered;
        for (std::size_t ch : n.children)
          for (const auto& p : cut.node(ch).proteins)
            if (n.proteins.count(p)) covered.insert(p);
        o.require(covered == n.proteins, "union premise fails for " + n.id);
        ++premises;
      }
    }
  }
  o.require(with_bins >= 20, "too few cuts with bins");
  o.detail = std::to_string(cuts) + " cuts (" + std::to_string(empty) + " empty), " + std::to_string(with_bins) +
             " with bins, " + std::to_string(premises) + " union premises";
  return o;
}

// ---------------------------------------------------------------- 7, 9

double metric(const std::string& report, const std::string& key) {
  const auto at = report.find("\n" + key + " = ");
  if (at == std::string::npos) throw std::runtime_error("metrics report lacks " + key);
  return std::stod(report.substr(at + key.size() + 4));
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sbr_acceptance_" + name);
  fs::remove_all(dir);
  return sbr::testing::write_synthetic_hierarchy(dir);
}

Outcome lambda_monotonicity() {
  Outcome o;
  const auto dir = scratch("lambda");
  std::vector<double> values;
  for (const double lc : {0.0, 10.0, 1e3}) {
    io::write_file_atomic(dir / "config.txt", sbr::testing::synthetic_config(lc));
    const auto out = dir / ("run_" + std::to_string(static_cast<int>(lc)));
    const auto r = cli::cmd_run(cli::load_config(dir / "config.txt"), out);
    o.require(r.ok, "run failed at lambda_c " + fmt(lc));
    if (!r.ok) return o;
    values.push_back(metric(io::read_file(out / "metrics.txt"), "consistency"));
  }
  o.require(values[1] >= values[0] && values[2] >= values[1], "consistency decreases");
  o.require(values[2] >= 0.95, "consistency at lambda_c = 1e3 below 0.95");
  o.detail = "C = " + fmt(values[0], "%.4f") + " -> " + fmt(values[1], "%.4f") + " -> " + fmt(values[2], "%.4f");
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto dir = scratch("determinism");
  io::write_file_atomic(dir / "config.txt", sbr::testing::synthetic_config(10.0, "seed = 17\n"));
  const auto config = cli::load_config(dir / "config.txt");
  std::vector<std::string> reports;
  for (const char* name : {"first", "second"}) {
    const auto r = cli::cmd_run(config, dir / name);
    o.require(r.ok, std::string(name) + " run failed");
    if (!r.ok) return o;
    reports.push_back(io::read_file(dir / name / "metrics.txt"));
  }
  o.require(reports[0] == reports[1], "metric reports differ");
  std::size_t same = 0;
  for (const char* f : {"node_stats.tsv", "curves/macro_pr.csv", "curves/micro_pr.csv", "folds.tsv", "rules.txt"})
    same += io::read_file(dir / "first" / f) == io::read_file(dir / "second" / f);
  o.detail = "metrics.txt identical (" + std::to_string(reports[0].size()) + " bytes); " + std::to_string(same) +
             "/5 other aggregate files identical";
  return o;
}

// ---------------------------------------------------------------- 8

eval::PredictionSet from_sets(const std::vector<std::string>& predicates, const std::vector<std::set<std::string>>& y,
                              const std::vector<std::set<std::string>>& z) {
  std::vector<std::string> ex;
  for (std::size_t i = 0; i < y.size(); ++i) ex.push_back("e" + std::to_string(i));
  eval::PredictionSet s(ex, predicates);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < predicates.size(); ++j) {
      const bool t = y[i].count(predicates[j]) != 0, p = z[i].count(predicates[j]) != 0;
      s.set(i, j, t, p, false, p ? 1.0 : 0.0);
    }
  return s;
}

Outcome metrics_and_folds() {
  Outcome o;
  std::mt19937_64 rng(8);

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t np = 2 + rng() % 40;
    std::vector<std::string> proteins;
    for (std::size_t i = 0; i < np; ++i) proteins.push_back("P" + std::to_string(i));
    std::map<std::string, std::set<std::string>> terms;
    const std::size_t nt = rng() % 8;
    for (std::size_t t = 0; t < nt; ++t) {
      auto& s = terms["T" + std::to_string(t)];
      const std::size_t m = 1 + rng() % np;
      for (std::size_t k = 0; k < m; ++k) s.insert(proteins[rng() % np]);
    }
    const std::size_t n = 2 + rng() % (np - 1);
    const auto folds = eval::generate_folds(n, proteins, terms, rng() % 3);
    std::multiset<std::string> seen;
    std::size_t lo = np, hi = 0;
    for (const auto& f : folds) {
      seen.insert(f.begin(), f.end());
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    o.require(folds.size() == n, "fold count");
    o.require(seen == std::multiset<std::string>(proteins.begin(), proteins.end()), "folds do not partition");
    o.require(hi - lo <= 1, "fold sizes differ by more than one");
  }

  // Hand arithmetic: Y = {a,b}, {}, {b}; Z = {a,b}, {a}, {}.
  const auto s = from_sets({"a", "b"}, {{"a", "b"}, {}, {"b"}}, {{"a", "b"}, {"a"}, {}});
  const auto ex = eval::example_metrics(s);
  // Per example: P = 1, 0, 0 (empty Z); R = 1, 0 (empty Y), 0; F1 = 1, 0, 0.
  o.require(ex.precision == 1.0 / 3 && ex.recall == 1.0 / 3 && ex.f1 == 1.0 / 3, "example metrics hand case");
  o.require(ex.exact_match == 1.0 / 3, "exact match hand case");
  const auto micro = eval::label_metrics(s, eval::Average::micro);
  const auto macro = eval::label_metrics(s, eval::Average::macro);
  // a: TP 1 FP 1 FN 0; b: TP 1 FP 0 FN 1. Both have F1 = 2/3.
  o.require(std::abs(micro.precision - 2.0 / 3) < 1e-15 && std::abs(micro.recall - 2.0 / 3) < 1e-15,
            "micro hand case");
  o.require(std::abs(macro.precision - 0.75) < 1e-15 && std::abs(macro.recall - 0.75) < 1e-15, "macro hand case");
  o.require(std::abs(macro.f1 - 2.0 / 3) < 1e-15, "macro F1 hand case");
  const auto partial = eval::example_metrics(from_sets({"a", "b"}, {{"a", "b"}}, {{"a"}}));
  o.require(partial.precision == 1.0 && partial.recall == 0.5 && std::abs(partial.f1 - 2.0 / 3) < 1e-15,
            "partial example hand case");

  // Consistency on predictions closed upward within the cut.
  int closed_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto g = ::testing::random_dag(rng, 5 + rng() % 20);
    const auto ann = ontology::tpr_closure(::testing::random_annotations(rng, g.dag, 30, true), g.dag);
    const auto cut = ontology::go_cut(g.dag, ann, {"biological_process"}, 2 + rng() % 5, 1);
    std::vector<std::string> preds;
    for (const auto& nd : cut.nodes())
      if (!nd.bin) preds.push_back(nd.predicate);
    std::vector<std::set<std::string>> z(8);
    for (auto& set : z) {
      std::vector<std::size_t> stack;
      for (std::size_t i = 0; i < cut.size(); ++i)
        if (!cut.node(i).bin && rng() % 4 == 0) stack.push_back(i);
      while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        if (set.insert(cut.node(i).predicate).second)
          for (auto p : cut.node(i).parents) stack.push_back(p);
      }
    }
    o.require(eval::consistency(from_sets(preds, std::vector<std::set<std::string>>(8), z), cut) == 1.0,
              "closed predictions not fully consistent");
    ++closed_cases;
  }

  // A single curve averaged with itself reproduces its own interpolation.
  double worst = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r{0.0, 1.0};
    const std::size_t points = 2 + rng() % 15;
    while (r.size() < points) r.push_back(unit(rng));
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    eval::PrCurve c;
    for (double x : r) c.push_back({x, unit(rng)});
    const eval::PrCurve one[] = {c};
    const auto avg = eval::average_pr_curves(one, 100);
    o.require(avg.size() == 101, "average curve does not have 101 samples");
    for (const auto& p : avg) {
      // Linear interpolation by scanning segments.
      double want = c.back().precision;
      for (std::size_t i = 1; i < c.size(); ++i)
        if (p.recall <= c[i].recall) {
          const double w = (p.recall - c[i - 1].recall) / (c[i].recall - c[i - 1].recall);
          want = (1 - w) * c[i - 1].precision + w * c[i].precision;
          break;
        }
      worst = std::max(worst, std::abs(p.precision - want));
    }
  }
  o.require(worst <= 1e-9, "self-reproduction error " + fmt(worst));
  o.detail = "1000 fold instances; hand cases; " + std::to_string(closed_cases) +
             " closed prediction sets with C = 1; self-reproduction max error " + fmt(worst);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  Outcome (*run)();
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const Criterion criteria[] = {
      {1, "truth-table endpoints and residua", 1, truth_tables},
      {2, "quantifier identities", 1, quantifier_identities},
      {3, "penalty and objective gradients vs central differences", 10, gradients},
      {4, "stage 1 reaches the ridge closed form", 5, ridge_oracle},
      {5, "kernel oracles and PSD Grams", 10, kernel_oracles},
      {6, "ontology cut, rule counts and bin premise", 5, ontology_suite},
      {7, "consistency non-decreasing in lambda_c", 60, lambda_monotonicity},
      {8, "metrics and folds", 5, metrics_and_folds},
      {9, "end-to-end determinism", 120, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds < c.budget_seconds, "runtime over budget");
    std::printf("%s %d %s (%.3f s of %.0f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, seconds,
                c.budget_seconds, o.detail.c_str());
    for (const auto& p : o.problems) std::printf("     %s\n", p.c_str());
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}
