#pragma once

// JSON renderings of run reports. Every report has a "results" object that is a
// pure function of the inputs and flags, and a separate "timing" object holding
// wall-clock measurements.

#include <string>
#include <vector>

#include <json.hpp>

#include "besn/pipeline.hpp"
#include "besn/readout.hpp"

namespace besn {

inline nlohmann::json eval_results_json(const EvalReport& r, const std::vector<std::string>& classes) {
  nlohmann::json confusion = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(r.confusion.cols()));
    for (Eigen::Index j = 0; j < r.confusion.cols(); ++j) row[static_cast<std::size_t>(j)] = r.confusion(i, j);
    confusion.push_back(row);
  }
  return {{"accuracy", r.accuracy},
          {"n_samples", r.n_samples},
          {"seed", r.seed},
          {"classes", classes},
          {"per_class_accuracy", r.per_class_accuracy},
          {"confusion", std::move(confusion)}};
}

inline nlohmann::json config_json(const PipelineConfig& c) {
  const auto& r = c.reservoir;
  return {{"direction", std::string(to_string(c.direction))},
          {"units", r.n_units},
          {"units_per_direction", c.units_per_direction()},
          {"spectral_radius", r.spectral_radius},
          {"input_scaling", r.input_scaling},
          {"leak_rate", r.leak_rate},
          {"density", r.density},
          {"bias_scale", r.bias_scale},
          {"noise_level", r.noise_level},
          {"washout", r.washout_frames},
          {"aggregation", std::string(to_string(c.aggregation))},
          {"shared_weights", c.shared_weights},
          {"lambda", c.lambda},
          {"lambda_grid", c.lambda_grid},
          {"seed", r.seed}};
}

}  // namespace besn
