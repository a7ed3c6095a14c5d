#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "random_dag.hpp"
#include "sbr/eval/curves.hpp"
#include "sbr/eval/folds.hpp"
#include "sbr/eval/metrics.hpp"
#include "sbr/io/text.hpp"
#include "sbr/ontology/cut.hpp"

using namespace sbr;
using namespace sbr::eval;

namespace {

const bool quiet = [] {
  spdlog::set_level(spdlog::level::err);
  return true;
}();

using Labels = std::vector<std::set<std::string>>;

// Builds a prediction set from per-example truth and predicted label sets.
PredictionSet from_sets(const std::vector<std::string>& predicates, const Labels& y, const Labels& z) {
  std::vector<std::string> ex;
  for (std::size_t i = 0; i < y.size(); ++i) ex.push_back("p" + std::to_string(i));
  PredictionSet s(ex, predicates);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < predicates.size(); ++j) {
      const bool t = y[i].count(predicates[j]) != 0, p = z[i].count(predicates[j]) != 0;
      s.set(i, j, t, p, false, p ? 1.0 : 0.0);
    }
  return s;
}

std::size_t common(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

ontology::CutNode node(const std::string& id, std::size_t level, std::vector<std::size_t> parents) {
  ontology::CutNode n;
  n.id = id;
  n.predicate = id;
  n.level = level;
  n.parents = std::move(parents);
  return n;
}

// R(0) <- A(1), B(1) <- C(2) with parents A and B; D(2) under A only.
ontology::GoCut small_cut() {
  return ontology::GoCut({node("R", 0, {}), node("A", 1, {0}), node("B", 1, {0}), node("C", 2, {1, 2}),
                          node("D", 2, {1})});
}

// Piecewise-linear evaluation by a plain scan over segments.
double scan_interpolate(const PrCurve& c, double r) {
  if (r <= c.front().recall) return c.front().precision;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (r <= c[i].recall) {
      const double w = (r - c[i - 1].recall) / (c[i].recall - c[i - 1].recall);
      return (1 - w) * c[i - 1].precision + w * c[i].precision;
    }
  }
  return c.back().precision;
}

// Random curve with strictly increasing recall from 0 to 1.
PrCurve random_curve(std::mt19937_64& rng, std::size_t points) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> r{0.0, 1.0};
  while (r.size() < points) r.push_back(unit(rng));
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  PrCurve c;
  for (double x : r) c.push_back({x, unit(rng)});
  return c;
}

}  // namespace

TEST_CASE("example metrics: hand cases") {
  auto s = from_sets({"a", "b"}, {{"a", "b"}}, {{"a"}});
  auto m = example_metrics(s);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.exact_match == 0.0);

  auto same = from_sets({"a", "b", "c"}, {{"a"}, {"b", "c"}}, {{"a"}, {"b", "c"}});
  m = example_metrics(same);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
  CHECK(m.exact_match == 1.0);

  // An empty prediction contributes 0 to all three; both empty contributes F1 1.
  auto empty = from_sets({"a", "b"}, {{"a"}, {}}, {{}, {}});
  m = example_metrics(empty);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.5);
  CHECK(m.exact_match == 0.5);
}

TEST_CASE("label metrics: hand cases") {
  // (TP,FP,FN) = (1,1,0) for a and (1,0,1) for b.
  auto s = from_sets({"a", "b"}, {{"a", "b"}, {}, {"b"}}, {{"a", "b"}, {"a"}, {}});
  const auto c = confusion(s);
  CHECK(c[0].tp == 1);
  CHECK(c[0].fp == 1);
  CHECK(c[0].fn == 0);
  CHECK(c[0].tn == 1);
  CHECK(c[1].tp == 1);
  CHECK(c[1].fn == 1);
  const auto micro = label_metrics(s, Average::micro);
  const auto macro = label_metrics(s, Average::macro);
  CHECK(micro.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(macro.precision == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(micro.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(macro.recall == doctest::Approx(0.75).epsilon(1e-15));

  // Never predicted: macro precision term 0.
  auto never = from_sets({"a", "b"}, {{"a", "b"}}, {{"a"}});
  CHECK(label_metrics(never, Average::macro).precision == 0.5);
}

TEST_CASE("metrics against set-based brute force on random instances") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> preds{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    Labels y(n), z(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& p : preds) {
        if (rng() % 2) y[i].insert(p);
        if (rng() % 2) z[i].insert(p);
      }
    const auto s = from_sets(preds, y, z);
    double p = 0, r = 0, f = 0, em = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double both = static_cast<double>(common(y[i], z[i]));
      const double pi = z[i].empty() ? 0 : both / z[i].size();
      const double ri = y[i].empty() ? 0 : both / y[i].size();
      const double fi = y[i].empty() && z[i].empty() ? 1 : 2 * both / static_cast<double>(y[i].size() + z[i].size());
      // Per example, F1 is the harmonic mean of P and R whenever both sets are non-empty.
      if (!y[i].empty() && !z[i].empty()) CHECK(std::abs(fi - (pi + ri > 0 ? 2 * pi * ri / (pi + ri) : 0)) < 1e-12);
      p += pi;
      r += ri;
      f += fi;
      em += y[i] == z[i];
    }
    const auto m = example_metrics(s);
    CHECK(std::abs(m.precision - p / n) < 1e-12);
    CHECK(std::abs(m.recall - r / n) < 1e-12);
    CHECK(std::abs(m.f1 - f / n) < 1e-12);
    CHECK(std::abs(m.exact_match - em / n) < 1e-12);
    for (auto avg : {Average::micro, Average::macro}) {
      const auto l = label_metrics(s, avg);
      for (double v : {l.precision, l.recall, l.f1}) CHECK((v >= 0 && v <= 1));
    }
  }
}

TEST_CASE("label metrics: micro equals macro for a single predicate") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    Labels y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 2) y[i].insert("a");
      if (rng() % 2) z[i].insert("a");
    }
    const auto s = from_sets({"a"}, y, z);
    const auto mi = label_metrics(s, Average::micro), ma = label_metrics(s, Average::macro);
    CHECK(mi.precision == ma.precision);
    CHECK(mi.recall == ma.recall);
    CHECK(mi.f1 == ma.f1);
  }
}

TEST_CASE("filtered metrics drop undecided cells") {
  PredictionSet s({"p0"}, {"a", "b"});
  s.set(0, 0, true, true, false, 0.9);
  s.set(0, 1, false, true, true, 0.5);  // undecided false positive
  CHECK(example_metrics(s).precision == 0.5);
  CHECK(example_metrics(s, Filter::decided).precision == 1.0);
  CHECK(label_metrics(s, Average::micro, Filter::decided).precision == 1.0);
  CHECK(confusion(s, Filter::decided)[1].fp == 0);
}

TEST_CASE("consistency: hand cases") {
  const auto cut = small_cut();
  const std::vector<std::string> preds{"A", "B", "C", "D"};
  // Only a level-2 node with two parents, neither predicted.
  CHECK(consistency(from_sets(preds, {{}}, {{"C"}}), cut) == 0.0);
  // One of two parents.
  CHECK(consistency(from_sets(preds, {{}}, {{"C", "A"}}), cut) == doctest::Approx((0.5 + 1) / 2));
  // Only level-1 predictions.
  CHECK(consistency(from_sets(preds, {{}}, {{"A", "B"}}), cut) == 1.0);
  // Empty prediction counts 1; averaging over two examples.
  CHECK(consistency(from_sets(preds, {{}, {}}, {{}, {"D"}}), cut) == 0.5);
  CHECK_THROWS_AS(consistency(from_sets({"X"}, {{}}, {{}}), cut), std::invalid_argument);
}

TEST_CASE("consistency: 1 on closed predictions, lower once a parent set is removed") {
  std::mt19937_64 rng(17);
  int strict = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto g = testing::random_dag(rng, 5 + rng() % 20);
    const auto ann = ontology::tpr_closure(testing::random_annotations(rng, g.dag, 30, true), g.dag);
    const auto cut = ontology::go_cut(g.dag, ann, {"biological_process"}, 3 + rng() % 4, 1);
    std::vector<std::string> preds;
    for (const auto& nd : cut.nodes())
      if (!nd.bin) preds.push_back(nd.predicate);
    // Closed sets: pick random nodes and add their ancestors within the cut.
    const std::size_t n = 6;
    Labels z(n);
    for (auto& set : z) {
      std::vector<std::size_t> stack;
      for (std::size_t i = 0; i < cut.size(); ++i)
        if (!cut.node(i).bin && rng() % 4 == 0) stack.push_back(i);
      while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        if (!set.insert(cut.node(i).predicate).second) continue;
        for (auto p : cut.node(i).parents) stack.push_back(p);
      }
    }
    const auto s = from_sets(preds, Labels(n), z);
    CHECK(consistency(s, cut) == 1.0);
    // Drop every parent of one deep prediction of example 0.
    for (const auto& name : z[0]) {
      const auto& nd = cut.node(cut.index_of_predicate(name));
      if (nd.level < 2 || nd.parents.empty()) continue;
      Labels broken = z;
      for (auto p : nd.parents) broken[0].erase(cut.node(p).predicate);
      CHECK(consistency(from_sets(preds, Labels(n), broken), cut) < 1.0);
      ++strict;
      break;
    }
  }
  CHECK(strict > 20);
}

TEST_CASE("pr_curve: hand case and recall order") {
  const std::vector<double> scores{0.9, 0.8, 0.8, 0.3};
  const bool labels[] = {true, false, true, false};
  const auto c = pr_curve(scores, labels);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == PrPoint{0.0, 1.0});
  CHECK(c[1] == PrPoint{0.5, 1.0});
  CHECK(c[2].recall == 1.0);
  CHECK(c[2].precision == doctest::Approx(2.0 / 3.0));
  CHECK(c[3] == PrPoint{1.0, 0.5});
  const bool none[] = {false, false, false, false};
  CHECK_THROWS_AS(pr_curve(scores, none), std::invalid_argument);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(20);
    bool l[20];
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = static_cast<double>(rng() % 7) / 7;
      l[i] = rng() % 2;
    }
    l[0] = true;
    const auto curve = pr_curve(s, l);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].recall >= curve[i - 1].recall);
    CHECK(curve.back().recall == 1.0);
    const double auc = auc_pr(curve);
    CHECK((auc >= 0 && auc <= 1));
  }
}

TEST_CASE("average_pr_curves: self reproduction, constants and a scan oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_curve(rng, 2 + rng() % 12);
    const PrCurve one[] = {c};
    const auto avg = average_pr_curves(one, 100);
    REQUIRE(avg.size() == 101);
    for (std::size_t i = 0; i <= 100; ++i) {
      CHECK(avg[i].recall == static_cast<double>(i) / 100);
      CHECK(std::abs(avg[i].precision - scan_interpolate(c, avg[i].recall)) <= 1e-9);
    }
  }

  const PrCurve constants[] = {{{0.0, 0.2}, {1.0, 0.2}}, {{0.3, 0.8}}};
  for (const auto& p : average_pr_curves(constants, 10)) CHECK(p.precision == doctest::Approx(0.5).epsilon(1e-15));

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PrCurve> set{random_curve(rng, 5), random_curve(rng, 8), random_curve(rng, 3)};
    const auto avg = average_pr_curves(set, 100);
    for (const auto& p : avg) {
      double sum = 0;
      for (const auto& c : set) sum += scan_interpolate(c, p.recall);
      CHECK(std::abs(p.precision - sum / 3) <= 1e-12);
    }
    std::vector<PrCurve> rev(set.rbegin(), set.rend());
    const auto avg2 = average_pr_curves(rev, 100);
    for (std::size_t i = 0; i < avg.size(); ++i) CHECK(std::abs(avg[i].precision - avg2[i].precision) <= 1e-12);
  }
}

TEST_CASE("interpolation collapses duplicate recalls to their best precision") {
  const PrCurve c{{0.0, 1.0}, {0.5, 0.4}, {0.5, 0.8}, {1.0, 0.5}};
  CHECK(interpolate_precision(c, 0.5) == 0.8);
  CHECK(interpolate_precision(c, 0.75) == doctest::Approx(0.65));
  CHECK(interpolate_precision(c, 0.25) == doctest::Approx(0.9));
}

TEST_CASE("auc_pr and curve csv") {
  CHECK(auc_pr({{0.0, 0.6}, {1.0, 0.6}}) == doctest::Approx(0.6));
  CHECK(auc_pr({{0.0, 1.0}, {1.0, 0.0}}) == doctest::Approx(0.5));
  CHECK(auc_pr({{0.3, 0.3}}) == 0.0);
  const PrCurve c{{0.0, 1.0}, {0.1, 1.0 / 3.0}, {1.0, 0.25}};
  CHECK(parse_curve_csv(format_curve_csv(c)) == c);
}

TEST_CASE("generate_folds: hand cases") {
  const std::vector<std::string> four{"p1", "p2", "p3", "p4"};
  auto f = generate_folds(2, four, {{"T", {"p1", "p2", "p3", "p4"}}});
  CHECK(f == Folds{{"p1", "p3"}, {"p2", "p4"}});

  // The rarest term's proteins land in distinct folds.
  const std::vector<std::string> six{"a", "b", "c", "d", "e", "f"};
  f = generate_folds(3, six, {{"common", {"a", "b", "c", "d", "e", "f"}}, {"rare", {"b", "e", "f"}}});
  std::set<std::size_t> where;
  for (const auto& p : {"b", "e", "f"})
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::count(f[i].begin(), f[i].end(), p)) where.insert(i);
  CHECK(where.size() == 3);

  f = generate_folds(4, four, {});
  for (const auto& fold : f) CHECK(fold.size() == 1);

  CHECK_THROWS_AS(generate_folds(5, four, {}), std::invalid_argument);
  CHECK_THROWS_AS(generate_folds(1, four, {}), std::invalid_argument);
  CHECK_THROWS_AS(generate_folds(2, four, {{"T", {"zz"}}}), std::invalid_argument);
}

TEST_CASE("generate_folds: partition and balance (property)") {
  std::mt19937_64 rng(99);
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
    const auto folds = generate_folds(n, proteins, terms, rng() % 3);
    REQUIRE(folds.size() == n);
    std::multiset<std::string> seen;
    std::size_t lo = np, hi = 0;
    for (const auto& f : folds) {
      seen.insert(f.begin(), f.end());
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    CHECK(seen == std::multiset<std::string>(proteins.begin(), proteins.end()));
    CHECK(hi - lo <= 1);
    if (!terms.empty()) {
      // The first term processed is spread evenly.
      auto first = std::min_element(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        return std::pair(a.second.size(), a.first) < std::pair(b.second.size(), b.first);
      });
      std::size_t flo = np, fhi = 0;
      for (const auto& f : folds) {
        std::size_t c = 0;
        for (const auto& p : f) c += first->second.count(p);
        flo = std::min(flo, c);
        fhi = std::max(fhi, c);
      }
      CHECK(fhi - flo <= 1);
    }
  }
}

TEST_CASE("generate_folds: seed 0 is sorted order, other seeds are reproducible") {
  std::vector<std::string> proteins;
  for (int i = 0; i < 20; ++i) proteins.push_back("P" + std::to_string(100 + i));
  std::map<std::string, std::set<std::string>> terms{{"T", {"P100", "P101", "P102", "P103", "P104", "P105"}}};
  auto shuffled = proteins;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(generate_folds(10, proteins, terms) == generate_folds(10, shuffled, terms));
  CHECK(generate_folds(10, proteins, terms, 7) == generate_folds(10, proteins, terms, 7));
  const auto f = generate_folds(10, proteins, terms);
  CHECK(parse_folds_tsv(format_folds_tsv(f)) == f);
  CHECK_THROWS_AS(parse_folds_tsv("a\t0\na\t1\n"), sbr::io::IoError);
  CHECK_THROWS_AS(parse_folds_tsv("a\t1\n"), sbr::io::IoError);
}
