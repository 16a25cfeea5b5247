#include "bitr/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace bitr {

using nlohmann::json;

namespace {

enum class Kind { Int, Real, Str, Bool, OptReal, StrList, Weights };

template <class T>
T get_as(const json& v, const std::string& key, json::value_t type) {
  const bool ok = type == json::value_t::number_float
                      ? v.is_number()
                      : (type == json::value_t::number_integer ? v.is_number_integer()
                                                               : v.type() == type);
  if (!ok) throw ConfigError("config key '" + key + "' has the wrong type");
  return v.get<T>();
}

struct Field {
  Kind kind;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

#define BITR_FIELD(KEY, KIND, T, JT)                                                           \
  {                                                                                            \
    #KEY, Field {                                                                              \
      KIND, [](RunConfig& c, const json& v) { c.KEY = get_as<T>(v, #KEY, JT); },               \
          [](const RunConfig& c) { return json(c.KEY); }                                       \
    }                                                                                          \
  }

const std::map<std::string, Field>& fields() {
  using VT = json::value_t;
  static const std::map<std::string, Field> table = {
      BITR_FIELD(scenario, Kind::Str, std::string, VT::string),
      BITR_FIELD(n, Kind::Int, int, VT::number_integer),
      BITR_FIELD(R, Kind::Int, int, VT::number_integer),
      BITR_FIELD(n_test, Kind::Int, int, VT::number_integer),
      BITR_FIELD(c1, Kind::Real, double, VT::number_float),
      BITR_FIELD(c2, Kind::Real, double, VT::number_float),
      BITR_FIELD(seed, Kind::Int, std::uint64_t, VT::number_integer),
      BITR_FIELD(censoring, Kind::Str, std::string, VT::string),
      BITR_FIELD(weight_floor, Kind::Real, double, VT::number_float),
      BITR_FIELD(cv_folds, Kind::Int, int, VT::number_integer),
      BITR_FIELD(n_trees, Kind::Int, int, VT::number_integer),
      BITR_FIELD(max_depth, Kind::Int, int, VT::number_integer),
      BITR_FIELD(min_leaf, Kind::Int, int, VT::number_integer),
      BITR_FIELD(feature_subsample, Kind::Real, double, VT::number_float),
      BITR_FIELD(width, Kind::Int, int, VT::number_integer),
      BITR_FIELD(hidden_layers, Kind::Int, int, VT::number_integer),
      BITR_FIELD(epochs, Kind::Int, int, VT::number_integer),
      BITR_FIELD(batch_size, Kind::Int, int, VT::number_integer),
      BITR_FIELD(learning_rate, Kind::Real, double, VT::number_float),
      BITR_FIELD(optimizer, Kind::Str, std::string, VT::string),
      BITR_FIELD(t1, Kind::Real, double, VT::number_float),
      BITR_FIELD(t2, Kind::Real, double, VT::number_float),
      BITR_FIELD(independent_errors, Kind::Bool, bool, VT::boolean),
      BITR_FIELD(output_dir, Kind::Str, std::string, VT::string),
      BITR_FIELD(jobs, Kind::Int, int, VT::number_integer),
      {"tau1",
       {Kind::OptReal,
        [](RunConfig& c, const json& v) {
          c.tau1 = v.is_null() ? std::nullopt
                               : std::optional<double>(get_as<double>(v, "tau1", VT::number_float));
        },
        [](const RunConfig& c) { return c.tau1 ? json(*c.tau1) : json(nullptr); }}},
      {"tau2",
       {Kind::OptReal,
        [](RunConfig& c, const json& v) {
          c.tau2 = v.is_null() ? std::nullopt
                               : std::optional<double>(get_as<double>(v, "tau2", VT::number_float));
        },
        [](const RunConfig& c) { return c.tau2 ? json(*c.tau2) : json(nullptr); }}},
      {"candidates",
       {Kind::StrList,
        [](RunConfig& c, const json& v) {
          if (!v.is_array()) throw ConfigError("config key 'candidates' must be a list");
          c.candidates.clear();
          for (const auto& e : v) c.candidates.push_back(get_as<std::string>(e, "candidates", VT::string));
        },
        [](const RunConfig& c) { return json(c.candidates); }}},
      {"weights",
       {Kind::Weights,
        [](RunConfig& c, const json& v) {
          if (!v.is_array()) throw ConfigError("config key 'weights' must be a list of [c1, c2]");
          c.weights.clear();
          for (const auto& e : v) {
            if (!e.is_array() || e.size() != 2)
              throw ConfigError("config key 'weights' must be a list of [c1, c2]");
            c.weights.emplace_back(get_as<double>(e[0], "weights", VT::number_float),
                                   get_as<double>(e[1], "weights", VT::number_float));
          }
        },
        [](const RunConfig& c) {
          json out = json::array();
          for (const auto& w : c.weights) out.push_back({w.c1, w.c2});
          return out;
        }}},
  };
  return table;
}

#undef BITR_FIELD

double parse_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("override '" + key + "': '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

json value_from_string(const std::string& key, Kind kind, const std::string& s) {
  switch (kind) {
    case Kind::Int: {
      long long v = 0;
      const auto* end = s.data() + s.size();
      const auto [ptr, ec] = std::from_chars(s.data(), end, v);
      if (ec != std::errc() || ptr != end)
        throw ConfigError("override '" + key + "': '" + s + "' is not an integer");
      return v;
    }
    case Kind::Real:
      return parse_real(key, s);
    case Kind::OptReal:
      if (s == "none" || s.empty()) return nullptr;
      return parse_real(key, s);
    case Kind::Str:
      return s;
    case Kind::Bool:
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw ConfigError("override '" + key + "': '" + s + "' is not a boolean");
    case Kind::StrList:
      return split(s, ',');
    case Kind::Weights: {
      json out = json::array();
      for (const auto& pair : split(s, ',')) {
        const auto parts = split(pair, ':');
        if (parts.size() != 2) throw ConfigError("override 'weights': expected c1:c2 pairs");
        out.push_back({parse_real(key, parts[0]), parse_real(key, parts[1])});
      }
      return out;
    }
  }
  return nullptr;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  const auto& table = fields();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(cfg, value);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, value_from_string(key, it->second.kind, assignment.substr(eq + 1)));
}

void validate_config(const RunConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  try {
    scenario_from_string(cfg.scenario);
    censoring_kind_from_string(cfg.censoring);
    for (const auto& c : cfg.candidates) copula_family_from_string(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(cfg.n >= 1, "n must be positive");
  require(cfg.R >= 1, "R must be at least 1");
  require(cfg.n_test >= 1, "n_test must be positive");
  require(!cfg.weights.empty(), "weights must list at least one configuration");
  require(!cfg.candidates.empty(), "candidates must list at least one copula family");
  require(cfg.cv_folds >= 2, "cv_folds must be at least 2");
  require(cfg.n_trees >= 1 && cfg.max_depth >= 0 && cfg.min_leaf >= 1, "invalid forest settings");
  require(cfg.feature_subsample > 0.0 && cfg.feature_subsample <= 1.0,
          "feature_subsample must lie in (0, 1]");
  require(cfg.width >= 1 && cfg.hidden_layers >= 0, "invalid network shape");
  require(cfg.epochs >= 1 && cfg.batch_size >= 1, "epochs and batch_size must be positive");
  require(cfg.learning_rate > 0.0, "learning_rate must be positive");
  require(cfg.optimizer == "adam" || cfg.optimizer == "sgd", "optimizer must be adam or sgd");
  require(cfg.weight_floor > 0.0 && cfg.weight_floor <= 1.0, "weight_floor must lie in (0, 1]");
  require(cfg.t1 > 0.0 && cfg.t2 > 0.0, "t1 and t2 must be positive");
  require(!cfg.tau1 || *cfg.tau1 > 0.0, "tau1 must be positive");
  require(!cfg.tau2 || *cfg.tau2 > 0.0, "tau2 must be positive");
  require(cfg.jobs >= 1, "jobs must be at least 1");
}

std::string config_to_json(const RunConfig& cfg) {
  json doc = json::object();
  for (const auto& [key, f] : fields()) doc[key] = f.get(cfg);
  return doc.dump(2) + "\n";
}

ItrOptions itr_options(const RunConfig& cfg) {
  ItrOptions o;
  o.censoring = censoring_kind_from_string(cfg.censoring);
  o.weight_floor = cfg.weight_floor;
  o.forest.n_trees = cfg.n_trees;
  o.forest.max_depth = cfg.max_depth;
  o.forest.min_leaf = cfg.min_leaf;
  o.forest.feature_subsample = cfg.feature_subsample;
  o.candidates.clear();
  for (const auto& c : cfg.candidates) o.candidates.push_back(copula_family_from_string(c));
  o.cv_folds = cfg.cv_folds;
  o.t1 = cfg.t1;
  o.t2 = cfg.t2;
  o.width = cfg.width;
  o.hidden_layers = cfg.hidden_layers;
  o.train.epochs = cfg.epochs;
  o.train.batch_size = cfg.batch_size;
  o.train.learning_rate = cfg.learning_rate;
  o.train.optimizer = cfg.optimizer == "sgd" ? Optimizer::SGD : Optimizer::Adam;
  o.seed = cfg.seed;
  return o;
}

ScenarioSpec scenario_spec(const RunConfig& cfg) {
  ScenarioSpec s = make_scenario(scenario_from_string(cfg.scenario), cfg.n);
  s.seed = cfg.seed;
  s.t1 = cfg.t1;
  s.t2 = cfg.t2;
  s.tau1 = cfg.tau1;
  s.tau2 = cfg.tau2;
  s.independent_errors = cfg.independent_errors;
  return s;
}

ReplicationOptions replication_options(const RunConfig& cfg) {
  ReplicationOptions o;
  o.R = cfg.R;
  o.n_test = cfg.n_test;
  o.jobs = cfg.jobs;
  o.itr = itr_options(cfg);
  return o;
}

}  // namespace bitr
