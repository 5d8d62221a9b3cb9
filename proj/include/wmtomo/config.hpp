// Copyright 2026 The wmtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment plans as flat JSON objects whose keys mirror ExperimentPlan:
//
//   {
//     "state_count": 2000, "runs_per_state": 1000, "ensemble_sizes": [30],
//     "epsilon_grid": [0.35], "a_grid": [0, 0.2, 0.4, 0.6, 0.8],
//     "distribution": "ball", "master_seed": 1,
//     "estimator_mode": "paper-naive", "clamp_estimates": false
//   }
//
// Every key is optional and falls back to the ExperimentPlan default. Unknown
// keys and wrongly typed values are rejected with the offending field named.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmtomo/harness.hpp"

namespace wmtomo {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : "field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline const char* distribution_name(StateDistribution d) {
  return d == StateDistribution::BallUniform ? "ball" : "surface";
}

inline std::optional<StateDistribution> parse_distribution(const std::string& s) {
  if (s == "ball") return StateDistribution::BallUniform;
  if (s == "surface") return StateDistribution::SurfaceUniform;
  return std::nullopt;
}

inline std::optional<EstimatorMode> parse_estimator(const std::string& s) {
  if (s == "calibrated") return EstimatorMode::Calibrated;
  if (s == "paper-naive") return EstimatorMode::PaperNaive;
  return std::nullopt;
}

namespace detail {

inline std::size_t positive_count(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) throw ConfigError(field, "expected a positive integer");
  return v.get<std::size_t>();
}

inline std::vector<double> number_list(const nlohmann::json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(field + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace detail

/// Applies the keys present in `j` on top of `plan`.
inline ExperimentPlan plan_from_json(const nlohmann::json& j, ExperimentPlan plan = {}) {
  if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "state_count") {
      plan.state_count = detail::positive_count(v, key);
    } else if (key == "runs_per_state") {
      plan.runs_per_state = detail::positive_count(v, key);
    } else if (key == "ensemble_sizes") {
      if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty array of integers");
      plan.ensemble_sizes.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string field = key + "[" + std::to_string(i) + "]";
        const std::size_t n = detail::positive_count(v[i], field);
        if (n < 3) throw ConfigError(field, "ensemble size must be at least 3");
        plan.ensemble_sizes.push_back(n);
      }
    } else if (key == "epsilon_grid") {
      plan.epsilon_grid = detail::number_list(v, key);
      for (std::size_t i = 0; i < plan.epsilon_grid.size(); ++i) {
        if (!(plan.epsilon_grid[i] > 0.0)) {
          throw ConfigError(key + "[" + std::to_string(i) + "]", "measurement strength must be positive");
        }
      }
    } else if (key == "a_grid") {
      plan.a_grid = detail::number_list(v, key);
      for (std::size_t i = 0; i < plan.a_grid.size(); ++i) {
        if (!(plan.a_grid[i] >= 0.0)) {
          throw ConfigError(key + "[" + std::to_string(i) + "]", "discard width must be non-negative");
        }
      }
    } else if (key == "distribution") {
      const auto d = v.is_string() ? parse_distribution(v.get<std::string>()) : std::nullopt;
      if (!d) throw ConfigError(key, "expected \"ball\" or \"surface\"");
      plan.distribution = *d;
    } else if (key == "master_seed") {
      if (!v.is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
      plan.master_seed = v.get<std::uint64_t>();
    } else if (key == "estimator_mode") {
      const auto m = v.is_string() ? parse_estimator(v.get<std::string>()) : std::nullopt;
      if (!m) throw ConfigError(key, "expected \"calibrated\" or \"paper-naive\"");
      plan.estimator_mode = *m;
    } else if (key == "clamp_estimates") {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
      plan.clamp_estimates = v.get<bool>();
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }
  return plan;
}

/// Parses configuration text; syntax errors report the line and column.
inline ExperimentPlan plan_from_text(const std::string& text, ExperimentPlan plan = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size()); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("", "JSON syntax error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what());
  }
  return plan_from_json(j, std::move(plan));
}

inline ExperimentPlan plan_from_file(const std::string& path, ExperimentPlan plan = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return plan_from_text(buf.str(), std::move(plan));
}

inline nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  return nlohmann::json{{"state_count", plan.state_count},
                        {"runs_per_state", plan.runs_per_state},
                        {"ensemble_sizes", plan.ensemble_sizes},
                        {"epsilon_grid", plan.epsilon_grid},
                        {"a_grid", plan.a_grid},
                        {"distribution", distribution_name(plan.distribution)},
                        {"master_seed", plan.master_seed},
                        {"estimator_mode", estimator_name(plan.estimator_mode)},
                        {"clamp_estimates", plan.clamp_estimates}};
}

}  // namespace wmtomo
