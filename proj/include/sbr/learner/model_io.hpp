#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sbr/learner/problem.hpp"
#include "sbr/learner/train.hpp"

namespace sbr::learner {

// JSON document with the config echo, one α vector per learned predicate,
// and the training trace. Doubles round-trip exactly.
std::string model_to_json(const Model& model, const TrainConfig& config);

// Reads back the model part; the config echo is ignored.
Model model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const Model& model, const TrainConfig& config);
Model load_model(const std::filesystem::path& path);

}  // namespace sbr::learner
