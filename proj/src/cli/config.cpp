#include "sbr/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "sbr/io/text.hpp"
#include "sbr/ontology/dag.hpp"

namespace sbr::cli {

namespace {

constexpr std::pair<RuleSet, std::string_view> kRuleNames[] = {
    {RuleSet::oc, "OC"},     {RuleSet::part_of, "partof"}, {RuleSet::pp1, "PP1"},
    {RuleSet::pp2, "PP2"},   {RuleSet::dpp1, "DPP1"},      {RuleSet::dpp2, "DPP2"},
};

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument("not a finite number");
  return x;
}

std::uint64_t to_unsigned(const std::string& v) {
  std::uint64_t x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size()) throw std::invalid_argument("not a non-negative integer");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("expected true or false");
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? std::string(sep) : "") + parts[i];
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::filesystem::path&)>;

Setter path_key(ExperimentConfig::Path ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const std::string& v, const std::filesystem::path& base) {
    std::filesystem::path p(v);
    c.*member = p.is_absolute() || base.empty() ? p : base / p;
  };
}

template <class T>
Setter unsigned_key(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
    c.*member = static_cast<T>(to_unsigned(v));
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"obo", path_key(&ExperimentConfig::obo)},
      {"annotations", path_key(&ExperimentConfig::annotations)},
      {"sequences", path_key(&ExperimentConfig::sequences)},
      {"domains", path_key(&ExperimentConfig::domains)},
      {"expression", path_key(&ExperimentConfig::expression)},
      {"complexes", path_key(&ExperimentConfig::complexes)},
      {"gram", path_key(&ExperimentConfig::gram)},
      {"ppi", path_key(&ExperimentConfig::ppi)},
      {"pair_gram", path_key(&ExperimentConfig::pair_gram)},
      {"namespaces",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.namespaces.clear();
         for (const auto& ns : io::split(v, ',')) c.namespaces.push_back(ontology::canonical_namespace(ns));
         if (c.namespaces.empty()) throw std::invalid_argument("no namespace given");
       }},
      {"level", unsigned_key(&ExperimentConfig::level)},
      {"min_proteins", unsigned_key(&ExperimentConfig::min_proteins)},
      {"kernel",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.kernel.kind = kernels::parse_kernel_kind(v);
       }},
      {"kmer",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.kernel.k = static_cast<std::size_t>(to_unsigned(v));
         if (c.kernel.k == 0) throw std::invalid_argument("kmer must be >= 1");
       }},
      {"beta",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) { c.kernel.beta = to_double(v); }},
      {"covariance",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         if (v == "elementwise") c.kernel.covariance = kernels::CovarianceForm::elementwise;
         else if (v == "double_sum") c.kernel.covariance = kernels::CovarianceForm::double_sum;
         else throw std::invalid_argument("expected elementwise or double_sum");
       }},
      {"normalize",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.kernel.normalize = to_bool(v);
       }},
      {"rules",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.rules.clear();
         if (v == "none") return;
         for (const auto& name : io::split(v, ',')) {
           const auto r = parse_rule_set(name);
           if (std::find(c.rules.begin(), c.rules.end(), r) == c.rules.end()) c.rules.push_back(r);
         }
       }},
      {"constraint_domain",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         if (v == "unsupervised") c.constrain_all = false;
         else if (v == "all") c.constrain_all = true;
         else throw std::invalid_argument("expected unsupervised or all");
       }},
      {"lambda_r",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) { c.train.lambda_r = to_double(v); }},
      {"lambda_c",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) { c.train.lambda_c = to_double(v); }},
      {"tnorm",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.tnorm = logic::parse_tnorm(v);
       }},
      {"implication",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         if (v == "residuum") c.train.implication = logic::ImplicationMode::residuum;
         else if (v == "material") c.train.implication = logic::ImplicationMode::material;
         else throw std::invalid_argument("expected residuum or material");
       }},
      {"learning_rate",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.learning_rate = to_double(v);
       }},
      {"max_iterations",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.max_iterations = static_cast<std::size_t>(to_unsigned(v));
       }},
      {"tolerance",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) { c.train.tolerance = to_double(v); }},
      {"gradient_tolerance",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.gradient_tolerance = to_double(v);
       }},
      {"backtracking",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.backtracking = to_bool(v);
       }},
      {"divergence_steps",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.divergence_steps = static_cast<std::size_t>(to_unsigned(v));
       }},
      {"threshold",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) { c.train.threshold = to_double(v); }},
      {"undecided_band",
       [](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
         c.train.undecided_band = to_double(v);
       }},
      {"folds", unsigned_key(&ExperimentConfig::folds)},
      {"seed", unsigned_key(&ExperimentConfig::seed)},
      {"curve_samples", unsigned_key(&ExperimentConfig::curve_samples)},
      {"jobs", unsigned_key(&ExperimentConfig::jobs)},
  };
  return table;
}

void check(const ExperimentConfig& c) {
  try {
    learner::validate(c.train);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.folds < 2) throw ConfigError("folds must be >= 2");
  if (c.curve_samples == 0) throw ConfigError("curve_samples must be >= 1");
  auto has = [&](RuleSet r) { return std::find(c.rules.begin(), c.rules.end(), r) != c.rules.end(); };
  const bool given = has(RuleSet::pp1) || has(RuleSet::dpp1);
  const bool learned = has(RuleSet::pp2) || has(RuleSet::dpp2);
  if (given && learned) throw ConfigError("rule sets mix a given BOUND (PP1/DPP1) with a learned one (PP2/DPP2)");
  if (given && !c.ppi) throw ConfigError("PP1/DPP1 need a `ppi` pair file");
  if (learned && (!c.ppi || !c.pair_gram)) throw ConfigError("PP2/DPP2 need `ppi` labels and a `pair_gram`");
}

}  // namespace

std::string_view to_string(RuleSet r) {
  for (const auto& [k, name] : kRuleNames)
    if (k == r) return name;
  return "?";
}

RuleSet parse_rule_set(std::string_view name) {
  for (const auto& [k, n] : kRuleNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown rule set '" + std::string(name) + "' (OC, partof, PP1, PP2, DPP1, DPP2)");
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  std::set<std::string> seen;
  for (const auto& [line_no, line] : io::content_lines(text)) {
    const auto where = "config line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key(io::trim(std::string_view(line).substr(0, eq)));
    const std::string value(io::trim(std::string_view(line).substr(eq + 1)));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    try {
      it->second(c, value, base_dir);
    } catch (const std::exception& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  check(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto c = parse_config(io::read_file(path), path.parent_path());
  const std::pair<const char*, const ExperimentConfig::Path*> files[] = {
      {"obo", &c.obo},           {"annotations", &c.annotations}, {"sequences", &c.sequences},
      {"domains", &c.domains},   {"expression", &c.expression},   {"complexes", &c.complexes},
      {"gram", &c.gram},         {"ppi", &c.ppi},                 {"pair_gram", &c.pair_gram}};
  for (const auto& [key, p] : files) {
    if (*p && !std::filesystem::is_regular_file(**p)) {
      throw ConfigError(path.string() + ": `" + key + "` file " + (*p)->string() + " does not exist");
    }
  }
  return c;
}

std::string format_config(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto path = [&](const char* key, const ExperimentConfig::Path& p) {
    if (p) kv.emplace_back(key, p->generic_string());
  };
  path("obo", c.obo);
  path("annotations", c.annotations);
  path("sequences", c.sequences);
  path("domains", c.domains);
  path("expression", c.expression);
  path("complexes", c.complexes);
  path("gram", c.gram);
  path("ppi", c.ppi);
  path("pair_gram", c.pair_gram);
  kv.emplace_back("namespaces", join(c.namespaces, ","));
  kv.emplace_back("level", std::to_string(c.level));
  kv.emplace_back("min_proteins", std::to_string(c.min_proteins));
  kv.emplace_back("kernel", std::string(kernels::to_string(c.kernel.kind)));
  kv.emplace_back("kmer", std::to_string(c.kernel.k));
  kv.emplace_back("beta", io::format_double(c.kernel.beta));
  kv.emplace_back("covariance", c.kernel.covariance == kernels::CovarianceForm::elementwise ? "elementwise" : "double_sum");
  kv.emplace_back("normalize", c.kernel.normalize ? "true" : "false");
  std::vector<std::string> rules;
  for (auto r : c.rules) rules.emplace_back(to_string(r));
  kv.emplace_back("rules", rules.empty() ? "none" : join(rules, ","));
  kv.emplace_back("constraint_domain", c.constrain_all ? "all" : "unsupervised");
  const auto& t = c.train;
  kv.emplace_back("lambda_r", io::format_double(t.lambda_r));
  kv.emplace_back("lambda_c", io::format_double(t.lambda_c));
  kv.emplace_back("tnorm", std::string(logic::to_string(t.tnorm)));
  kv.emplace_back("implication", t.implication == logic::ImplicationMode::residuum ? "residuum" : "material");
  kv.emplace_back("learning_rate", io::format_double(t.learning_rate));
  kv.emplace_back("max_iterations", std::to_string(t.max_iterations));
  kv.emplace_back("tolerance", io::format_double(t.tolerance));
  kv.emplace_back("gradient_tolerance", io::format_double(t.gradient_tolerance));
  kv.emplace_back("backtracking", t.backtracking ? "true" : "false");
  kv.emplace_back("divergence_steps", std::to_string(t.divergence_steps));
  kv.emplace_back("threshold", io::format_double(t.threshold));
  kv.emplace_back("undecided_band", io::format_double(t.undecided_band));
  kv.emplace_back("folds", std::to_string(c.folds));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("curve_samples", std::to_string(c.curve_samples));
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace sbr::cli
