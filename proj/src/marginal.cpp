#include "bitr/marginal.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "bitr/numeric.hpp"

namespace bitr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double ipcw_weight(const Observation& o, int outcome, const CensoringModel& G) {
  return o.delta(outcome) == 1 ? 1.0 / eval_G(G, o.y(outcome), o.x) : 0.0;
}

}  // namespace

double MarginalFit::linear_index(std::span<const double> x) const { return dot(beta, x); }

ArmProbability estimate_kappa(const Dataset& d, int a) {
  const std::size_t n_a = d.arm_size(a);
  if (n_a == 0 || n_a == d.size())
    throw PositivityError("arm " + std::to_string(a) + " has " + std::to_string(n_a) + " of " +
                          std::to_string(d.size()) +
                          " observations; its probability must lie strictly inside (0, 1)");
  return {static_cast<double>(n_a) / static_cast<double>(d.size()), a};
}

std::vector<double> app_score(std::span<const double> beta, const Predictor& f,
                              const CensoringModel& G, double kappa, const Observation& obs,
                              int outcome, int arm, const WeightConfig& c) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw PositivityError("kappa must lie in (0, 1)");
  const std::size_t p = beta.size();
  const double fitted = dot(beta, obs.x);
  double scale = 0.0;
  if (obs.a == arm) {
    scale += ipcw_weight(obs, outcome, G) * (std::log(obs.y(outcome)) - fitted) / kappa;
    if (c.c1 != 0.0) scale += c.c1 / kappa * (f.predict(obs.x) - fitted);
  } else if (c.c2 != 0.0) {
    scale += c.c2 / (1.0 - kappa) * (f.predict(obs.x) - fitted);
  }
  std::vector<double> out(p);
  for (std::size_t k = 0; k < p; ++k) out[k] = obs.x[k] * scale;
  return out;
}

std::vector<double> mean_app_score(std::span<const double> beta, const Predictor& f,
                                   const CensoringModel& G, double kappa, const Dataset& d,
                                   int outcome, int arm, const WeightConfig& c) {
  std::vector<double> acc(beta.size(), 0.0);
  for (const auto& o : d) {
    auto s = app_score(beta, f, G, kappa, o, outcome, arm, c);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += s[k];
  }
  for (auto& v : acc) v /= static_cast<double>(d.size());
  return acc;
}

MarginalFit solve_app_beta(const Dataset& d, int outcome, int arm, const Predictor& f,
                           const CensoringModel& G, double kappa, const WeightConfig& c) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw PositivityError("kappa must lie in (0, 1)");
  const int p = d.p();
  const std::size_t n_a = d.arm_size(arm);
  const std::size_t n_rest = d.size() - n_a;
  if (n_a == 0) throw EmptyArmError("arm " + std::to_string(arm) + " has no observations");

  Eigen::MatrixXd ipcw_gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd arm_gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd rest_gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd ipcw_rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd arm_rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd rest_rhs = Eigen::VectorXd::Zero(p);

  const bool need_f_arm = c.c1 != 0.0;
  const bool need_f_rest = c.c2 != 0.0;
  for (const auto& o : d) {
    Eigen::Map<const Eigen::VectorXd> x(o.x.data(), p);
    if (o.a == arm) {
      const double w = ipcw_weight(o, outcome, G);
      const Eigen::MatrixXd xx = x * x.transpose();
      ipcw_gram += w * xx;
      ipcw_rhs += w * std::log(o.y(outcome)) * x;
      arm_gram += xx;
      if (need_f_arm) arm_rhs += f.predict(o.x) * x;
    } else {
      rest_gram += x * x.transpose();
      if (need_f_rest) rest_rhs += f.predict(o.x) * x;
    }
  }

  const double inv_na = 1.0 / static_cast<double>(n_a);
  const double inv_rest = n_rest > 0 ? 1.0 / static_cast<double>(n_rest) : 0.0;
  const Eigen::MatrixXd M = inv_na * ipcw_gram + c.c1 * inv_na * arm_gram + c.c2 * inv_rest * rest_gram;
  const Eigen::VectorXd v = inv_na * ipcw_rhs + c.c1 * inv_na * arm_rhs + c.c2 * inv_rest * rest_rhs;

  auto singular = [&](const std::string& why) {
    return SingularMatrixError("APP system for outcome " + std::to_string(outcome) + ", arm " +
                               std::to_string(arm) + " with c = " + c.label() + " is " + why);
  };
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (!(sv(p - 1) > 0.0) || !std::isfinite(sv(0))) throw singular("singular");
  if (sv(0) / sv(p - 1) > kMaxConditionNumber)
    throw singular("ill-conditioned (condition number " + format_double(sv(0) / sv(p - 1)) + ")");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  const Eigen::VectorXd beta = qr.solve(v);

  MarginalFit fit;
  fit.beta.assign(beta.data(), beta.data() + p);
  fit.outcome = outcome;
  fit.arm = arm;
  fit.c = c;
  return fit;
}

double estimate_gamma(const Dataset& arm, int outcome, std::span<const double> beta,
                      const CensoringModel& G) {
  double sw = 0.0, swr = 0.0;
  for (const auto& o : arm) {
    const double w = ipcw_weight(o, outcome, G);
    if (w == 0.0) continue;
    const double r = std::log(o.y(outcome)) - dot(beta, o.x);
    sw += w;
    swr += w * r * r;
  }
  if (!(sw > 0.0))
    throw FitError("scale estimate for outcome " + std::to_string(outcome) +
                   ": total IPCW weight is zero");
  return std::sqrt(swr / sw);
}

double marginal_survival(double t, std::span<const double> x, const MarginalFit& fit) {
  if (!(t > 0.0)) throw std::invalid_argument("marginal_survival requires t > 0");
  if (!(fit.gamma > 0.0)) throw std::invalid_argument("marginal_survival requires gamma > 0");
  return normal_sf((std::log(t) - fit.linear_index(x)) / fit.gamma);
}

double marginal_density(double t, std::span<const double> x, const MarginalFit& fit) {
  const double z = (std::log(t) - fit.linear_index(x)) / fit.gamma;
  return normal_pdf(z) / (fit.gamma * t);
}

}  // namespace bitr
