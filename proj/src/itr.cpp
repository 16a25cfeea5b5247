#include "bitr/itr.hpp"

#include "bitr/numeric.hpp"

namespace bitr {

namespace {

std::string context(int outcome, int arm) {
  return "outcome " + std::to_string(outcome) + ", arm " + std::to_string(arm) + ": ";
}

}  // namespace

double JointModel::survival(double t1, double t2, std::span<const double> x, int a) const {
  const auto& arm = arms.at(static_cast<std::size_t>(a));
  return joint_survival(t1, t2, x, arm.m1, arm.m2, arm.copula);
}

std::vector<double> JointModel::survival_vector(double t1, double t2,
                                                std::span<const double> x) const {
  std::vector<double> s(arms.size());
  for (std::size_t a = 0; a < arms.size(); ++a) s[a] = survival(t1, t2, x, static_cast<int>(a));
  return s;
}

Nuisance fit_nuisance(const Dataset& d, const ItrOptions& opts) {
  if (d.K() < 1) throw std::invalid_argument("treatment decision needs at least two arms");
  Nuisance nu;
  const int arms = d.K() + 1;
  nu.kappa.resize(arms);
  for (int a = 0; a < arms; ++a) {
    nu.kappa[a] = estimate_kappa(d, a).kappa;
    const Dataset arm = split_by_arm(d, a);
    if (arm.size() < static_cast<std::size_t>(d.p() + 2))
      throw FitError("arm " + std::to_string(a) + " has " + std::to_string(arm.size()) +
                     " rows; at least p + 2 are required");
    for (int j = 1; j <= 2; ++j) {
      try {
        nu.G[j - 1].push_back(fit_censoring(arm, j, opts.censoring, opts.weight_floor));
        ForestParams fp = opts.forest;
        fp.seed = mix_seed(opts.seed, 100 + static_cast<std::uint64_t>(10 * a + j));
        nu.f[j - 1].push_back(fit_ipcw_forest(arm, j, nu.G[j - 1].back(), fp));
      } catch (const FitError& e) {
        throw FitError(context(j, a) + e.what());
      }
    }
  }
  return nu;
}

JointModel fit_joint_model(const Dataset& d, const Nuisance& nu, const WeightConfig& c,
                           const ItrOptions& opts) {
  JointModel model;
  model.p = d.p();
  const int arms = d.K() + 1;
  for (int a = 0; a < arms; ++a) {
    const Dataset arm = split_by_arm(d, a);
    ArmModel am;
    am.kappa = nu.kappa[a];
    MarginalFit* fits[2] = {&am.m1, &am.m2};
    for (int j = 1; j <= 2; ++j) {
      try {
        const auto& G = nu.G[j - 1][a];
        *fits[j - 1] = solve_app_beta(d, j, a, nu.f[j - 1][a], G, am.kappa, c);
        fits[j - 1]->gamma = estimate_gamma(arm, j, fits[j - 1]->beta, G);
        if (!(fits[j - 1]->gamma > 0.0))
          throw FitError("estimated scale is zero");
      } catch (const FitError& e) {
        throw FitError(context(j, a) + e.what());
      }
    }
    const auto& G1 = nu.G[0][a];
    const auto& G2 = nu.G[1][a];
    const auto sel = select_link_cv(arm, am.m1, am.m2, G1, G2, opts.candidates, opts.cv_folds,
                                    mix_seed(opts.seed, 200 + static_cast<std::uint64_t>(a)));
    am.copula = fit_theta(arm, am.m1, am.m2, G1, G2, sel.family);
    am.copula.arm = a;
    model.arms.push_back(std::move(am));
  }
  return model;
}

std::vector<PolicySample> survival_samples(const JointModel& model,
                                           const std::vector<std::vector<double>>& xs, double t1,
                                           double t2) {
  std::vector<PolicySample> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back({x, model.survival_vector(t1, t2, x)});
  return out;
}

FittedItr fit_policy(JointModel model, const Dataset& d, const ItrOptions& opts) {
  std::vector<std::vector<double>> xs;
  xs.reserve(d.size());
  for (const auto& o : d) xs.push_back(o.x);
  const auto samples = survival_samples(model, xs, opts.t1, opts.t2);

  auto net = init_network(d.p(), model.K(), opts.width, mix_seed(opts.seed, 300),
                          opts.hidden_layers);
  TrainConfig cfg = opts.train;
  cfg.seed = mix_seed(opts.seed, 301);
  auto trained = train(std::move(net), samples, cfg);
  return {std::move(model), std::move(trained.net), std::move(trained.loss_history)};
}

FittedItr fit_itr(const Dataset& d, const WeightConfig& c, const ItrOptions& opts) {
  const Nuisance nu = fit_nuisance(d, opts);
  return fit_policy(fit_joint_model(d, nu, c, opts), d, opts);
}

}  // namespace bitr
