#include "bitr/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bitr {

using nlohmann::json;

namespace {

json marginal_json(const MarginalFit& m) {
  return {{"arm", m.arm},   {"outcome", m.outcome}, {"beta", m.beta},
          {"gamma", m.gamma}, {"c1", m.c.c1},        {"c2", m.c.c2}};
}

MarginalFit marginal_from(const json& j) {
  MarginalFit m;
  m.arm = j.at("arm").get<int>();
  m.outcome = j.at("outcome").get<int>();
  m.beta = j.at("beta").get<std::vector<double>>();
  m.gamma = j.at("gamma").get<double>();
  m.c = WeightConfig(j.at("c1").get<double>(), j.at("c2").get<double>());
  if (!(m.gamma > 0.0)) throw ModelFormatError("marginal gamma must be positive");
  return m;
}

}  // namespace

std::string model_to_json(const SavedModel& m) {
  json arms = json::array();
  for (std::size_t a = 0; a < m.model.arms.size(); ++a) {
    const auto& am = m.model.arms[a];
    arms.push_back({{"arm", static_cast<int>(a)},
                    {"kappa", am.kappa},
                    {"marginals", {marginal_json(am.m1), marginal_json(am.m2)}},
                    {"copula",
                     {{"family", to_string(am.copula.family)},
                      {"theta", am.copula.theta},
                      {"neg_loglik", am.copula.neg_loglik},
                      {"at_boundary", am.copula.at_boundary}}}});
  }
  json layers = json::array();
  for (std::size_t l = 0; l < m.net.weights.size(); ++l) {
    const auto& W = m.net.weights[l];
    std::vector<double> w;
    w.reserve(W.size());
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) w.push_back(W(r, c));
    const auto& b = m.net.biases[l];
    layers.push_back({{"rows", W.rows()},
                      {"cols", W.cols()},
                      {"weights", w},
                      {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  json doc = {{"format", "bitr-model"},
              {"version", kModelFormatVersion},
              {"p", m.model.p},
              {"K", m.model.K()},
              {"t1", m.t1},
              {"t2", m.t2},
              {"c1", m.c.c1},
              {"c2", m.c.c2},
              {"arms", arms},
              {"network", {{"dims", m.net.dims}, {"layers", layers}}}};
  return doc.dump(2) + "\n";
}

SavedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", std::string()) != "bitr-model")
      throw ModelFormatError("not a bitr model file");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw ModelFormatError("unsupported model version " + std::to_string(version));

    SavedModel m;
    m.model.p = doc.at("p").get<int>();
    m.t1 = doc.at("t1").get<double>();
    m.t2 = doc.at("t2").get<double>();
    m.c = WeightConfig(doc.at("c1").get<double>(), doc.at("c2").get<double>());
    for (const auto& ja : doc.at("arms")) {
      ArmModel am;
      am.kappa = ja.at("kappa").get<double>();
      const auto& mg = ja.at("marginals");
      if (mg.size() != 2) throw ModelFormatError("each arm needs two marginal fits");
      am.m1 = marginal_from(mg[0]);
      am.m2 = marginal_from(mg[1]);
      if (static_cast<int>(am.m1.beta.size()) != m.model.p ||
          static_cast<int>(am.m2.beta.size()) != m.model.p)
        throw ModelFormatError("coefficient length does not match p = " +
                               std::to_string(m.model.p));
      const auto& jc = ja.at("copula");
      am.copula.family = copula_family_from_string(jc.at("family").get<std::string>());
      am.copula.theta = jc.at("theta").get<double>();
      am.copula.neg_loglik = jc.value("neg_loglik", 0.0);
      am.copula.at_boundary = jc.value("at_boundary", false);
      am.copula.arm = ja.at("arm").get<int>();
      check_theta(am.copula.family, am.copula.theta);
      m.model.arms.push_back(std::move(am));
    }
    if (m.model.K() != doc.at("K").get<int>())
      throw ModelFormatError("arm count does not match K");

    const auto& net = doc.at("network");
    m.net.dims = net.at("dims").get<std::vector<int>>();
    const auto& layers = net.at("layers");
    if (m.net.dims.size() != layers.size() + 1)
      throw ModelFormatError("network dims and layer count disagree");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& jl = layers[l];
      const auto rows = jl.at("rows").get<Eigen::Index>();
      const auto cols = jl.at("cols").get<Eigen::Index>();
      if (rows != m.net.dims[l + 1] || cols != m.net.dims[l])
        throw ModelFormatError("layer " + std::to_string(l) + " shape disagrees with dims");
      const auto w = jl.at("weights").get<std::vector<double>>();
      const auto b = jl.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows)
        throw ModelFormatError("layer " + std::to_string(l) + " has the wrong number of values");
      Eigen::MatrixXd W(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) W(r, c) = w[r * cols + c];
      m.net.weights.push_back(std::move(W));
      m.net.biases.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
    }
    if (m.net.input_dim() != m.model.p || m.net.n_arms() != m.model.K() + 1)
      throw ModelFormatError("network shape does not match p and K");
    return m;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ModelFormatError(std::string("invalid model file: ") + e.what());
  }
}

void save_model(const SavedModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(m);
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace bitr
