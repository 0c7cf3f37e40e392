#pragma once

// Scenario files: a JSON document with the sections below. Every object is
// checked against its allowed keys so a misspelled parameter is an error
// rather than a silently ignored default.
//
//   {
//     "population": {"groups": [{"alpha": 0.2, "sigma": 0.5, "proportion": 0.5}, ...],
//                    "n_buyers": 1000000},
//     "product":    {"variants": 2, "qualities": [0.2, 0.7], "weights": [0.5, 0.5],
//                    "price": 1, "beta": 1, "gamma": 1, "max_variants": 8},
//     "cost":       {"z": 0.002, "mode": "independent" | "damaged-goods"},
//     "spam":       {"alpha": 0.3, "z": 1e-4, "perception_cap": 500,
//                    "quality": 0.004, "count": 130},
//     "sweep":      {"axes": [{"variable": "c2", "from": 0, "to": 1, "step": 0.01}],
//                    "report": "phase"},
//     "output":     {"path": "out.csv", "format": "csv"}
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdiff/model.hpp"
#include "qdiff/spam.hpp"

namespace qdiff {

struct GroupSpec {
  double alpha = 0.0;
  double sigma = 0.0;
  double proportion = 1.0;
};

struct PopulationSpec {
  std::vector<GroupSpec> groups;
  std::int64_t n_buyers = 1;

  Population build() const;
};

struct ProductSpec {
  int variants = 1;
  std::vector<double> qualities;
  std::vector<double> weights;
  double price = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  int max_variants = 8;

  LineShape shape() const { return {price, beta, gamma}; }
  /// Empty when uniform.
  VectorXd weight_vector() const;
  ProductLine build_line() const;
};

struct CostSpec {
  double z = 0.0;
  ProductionMode mode = ProductionMode::independent;

  CostModel build() const { return CostModel(z, mode); }
};

struct SpamSpec {
  double alpha = 0.0;
  double z = 0.0;
  std::optional<std::int64_t> perception_cap;
  std::optional<double> quality;
  std::optional<std::int64_t> count;

  SpamScenario build() const { return SpamScenario(alpha, z, perception_cap); }
};

struct SweepAxis {
  std::string variable;
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;

  /// from, from + step, ... up to `to` inclusive (within 1e-9 step).
  std::vector<double> points() const;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::string report = "optimize";
};

struct OutputSpec {
  std::string path;
  std::string format = "csv";
};

struct ScenarioConfig {
  std::optional<PopulationSpec> population;
  std::optional<ProductSpec> product;
  std::optional<CostSpec> cost;
  std::optional<SpamSpec> spam;
  std::optional<SweepSpec> sweep;
  std::optional<OutputSpec> output;
  nlohmann::json source;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

}  // namespace qdiff
