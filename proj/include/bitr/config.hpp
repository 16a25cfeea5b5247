#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitr/data.hpp"
#include "bitr/simulation.hpp"

namespace bitr {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every knob a command reads. Defaults follow the simulation protocol:
/// n = 200, R = 100, n_test = 1000, t* = (1, 1).
struct RunConfig {
  std::string scenario = "main";
  int n = 200;
  int R = 100;
  int n_test = 1000;
  /// weight configurations compared by `simulate`
  std::vector<WeightConfig> weights{{0.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}};
  /// single configuration used by `fit`
  double c1 = 0.0;
  double c2 = 0.0;
  std::uint64_t seed = 20240601;
  std::string censoring = "km";
  double weight_floor = 0.02;
  std::vector<std::string> candidates{"clayton", "gumbel", "frank"};
  int cv_folds = 5;
  int n_trees = 100;
  int max_depth = 6;
  int min_leaf = 5;
  double feature_subsample = 1.0;
  int width = 32;
  int hidden_layers = 2;
  int epochs = 500;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  double t1 = 1.0;
  double t2 = 1.0;
  std::optional<double> tau1;
  std::optional<double> tau2;
  bool independent_errors = false;
  std::string output_dir = "out";
  int jobs = 1;
};

/// Parse a JSON object; unknown keys and ill-typed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Apply one `key=value` override. Lists are comma separated; weights are
/// `c1:c2` pairs, e.g. `weights=0:0,1:1,-1:1`.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Range checks shared by every command.
void validate_config(const RunConfig& cfg);

std::string config_to_json(const RunConfig& cfg);

ItrOptions itr_options(const RunConfig& cfg);
ScenarioSpec scenario_spec(const RunConfig& cfg);
ReplicationOptions replication_options(const RunConfig& cfg);

}  // namespace bitr
