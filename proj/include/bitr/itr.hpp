#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bitr/censoring.hpp"
#include "bitr/copula.hpp"
#include "bitr/data.hpp"
#include "bitr/forest.hpp"
#include "bitr/marginal.hpp"
#include "bitr/policy.hpp"

namespace bitr {

/// Estimated parameters η̂_a of one arm.
struct ArmModel {
  MarginalFit m1;
  MarginalFit m2;
  CopulaFit copula;
  double kappa = 0.0;
};

/// Estimated survival surface Ŝ(t1, t2, x, a) over all K+1 arms.
struct JointModel {
  int p = 0;
  std::vector<ArmModel> arms;

  int K() const { return static_cast<int>(arms.size()) - 1; }
  double survival(double t1, double t2, std::span<const double> x, int a) const;
  std::vector<double> survival_vector(double t1, double t2, std::span<const double> x) const;
};

struct ItrOptions {
  CensoringKind censoring = CensoringKind::KaplanMeier;
  double weight_floor = kDefaultWeightFloor;
  ForestParams forest;
  std::vector<CopulaFamily> candidates = kAllFamilies;
  int cv_folds = 5;
  double t1 = 1.0;
  double t2 = 1.0;
  int width = 32;
  int hidden_layers = 2;
  TrainConfig train;
  std::uint64_t seed = 1;
};

/// Per-(outcome, arm) nuisance fits that do not depend on the weights c:
/// censoring models, auxiliary predictors and arm probabilities.
struct Nuisance {
  // indexed [outcome - 1][arm]
  std::vector<CensoringModel> G[2];
  std::vector<ForestPredictor> f[2];
  std::vector<double> kappa;
};

/// Phase 1 nuisance estimation for every (outcome, arm).
Nuisance fit_nuisance(const Dataset& d, const ItrOptions& opts);

/// Phases 1-2 given the nuisance fits: APP β̂, γ̂, then θ̂ with
/// cross-validated link selection, for every arm.
JointModel fit_joint_model(const Dataset& d, const Nuisance& nu, const WeightConfig& c,
                           const ItrOptions& opts);

/// Policy training rows with the estimated survival vector at (t1, t2).
std::vector<PolicySample> survival_samples(const JointModel& model,
                                           const std::vector<std::vector<double>>& xs, double t1,
                                           double t2);

struct FittedItr {
  JointModel model;
  PolicyNetwork net;
  std::vector<double> loss_history;
};

/// Phase 3: train the softmax policy on the estimated survival matrix.
FittedItr fit_policy(JointModel model, const Dataset& d, const ItrOptions& opts);

/// All three phases.
FittedItr fit_itr(const Dataset& d, const WeightConfig& c, const ItrOptions& opts);

}  // namespace bitr
