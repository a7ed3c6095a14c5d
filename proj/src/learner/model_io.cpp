#include "sbr/learner/model_io.hpp"

#include <json.hpp>

#include "sbr/io/text.hpp"

namespace sbr::learner {

using nlohmann::json;

std::string model_to_json(const Model& model, const TrainConfig& c) {
  json config = {
      {"lambda_r", c.lambda_r},
      {"lambda_c", c.lambda_c},
      {"tnorm", std::string(logic::to_string(c.tnorm))},
      {"implication", c.implication == logic::ImplicationMode::residuum ? "residuum" : "material"},
      {"learning_rate", c.learning_rate},
      {"max_iterations", c.max_iterations},
      {"tolerance", c.tolerance},
      {"backtracking", c.backtracking},
      {"divergence_steps", c.divergence_steps},
      {"threshold", c.threshold},
      {"undecided_band", c.undecided_band},
  };
  json tasks = json::array();
  for (std::size_t k = 0; k < model.predicates.size(); ++k) {
    const auto& a = model.alpha.at(k);
    tasks.push_back({{"predicate", model.predicates[k]}, {"alpha", std::vector<double>(a.data(), a.data() + a.size())}});
  }
  json doc = {
      {"config", config},
      {"tasks", tasks},
      {"trace", model.trace},
      {"stage_boundary", model.stage_boundary},
      {"stage1_converged", model.stage1_converged},
      {"stage2_converged", model.stage2_converged},
  };
  return doc.dump(1) + "\n";
}

Model model_from_json(std::string_view text) {
  Model m;
  try {
    const json doc = json::parse(text);
    for (const auto& t : doc.at("tasks")) {
      m.predicates.push_back(t.at("predicate").get<std::string>());
      const auto a = t.at("alpha").get<std::vector<double>>();
      m.alpha.push_back(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
    }
    m.trace = doc.at("trace").get<std::vector<double>>();
    m.stage_boundary = doc.at("stage_boundary").get<std::size_t>();
    m.stage1_converged = doc.at("stage1_converged").get<bool>();
    m.stage2_converged = doc.at("stage2_converged").get<bool>();
  } catch (const json::exception& e) {
    throw io::IoError(std::string("malformed model file: ") + e.what());
  }
  return m;
}

void save_model(const std::filesystem::path& path, const Model& model, const TrainConfig& config) {
  io::write_file_atomic(path, model_to_json(model, config));
}

Model load_model(const std::filesystem::path& path) { return model_from_json(io::read_file(path)); }

}  // namespace sbr::learner
