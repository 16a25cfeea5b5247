#pragma once

#include <span>
#include <vector>

#include "bitr/censoring.hpp"
#include "bitr/data.hpp"
#include "bitr/forest.hpp"

namespace bitr {

/// Lognormal AFT marginal for one (outcome, arm): log T = xᵀβ + γ·ε.
struct MarginalFit {
  std::vector<double> beta;
  double gamma = 1.0;
  int outcome = 1;
  int arm = 0;
  WeightConfig c;

  double linear_index(std::span<const double> x) const;
};

struct ArmProbability {
  double kappa = 0.5;
  int arm = 0;
};

/// Raised when an arm probability is 0 or 1.
class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n_a / n over the full dataset.
ArmProbability estimate_kappa(const Dataset& d, int a);

/// One observation's contribution to the APP estimating equation for
/// (outcome, arm), evaluated at `beta`.
///
/// The IPCW residual term is I(A = a)/κ · xΔ_j/Ĝ(y_j, x) · (log y_j − xᵀβ),
/// so that the sample mean of this score is exactly the normalized system
/// solved by solve_app_beta. The prediction terms are
/// c1·I(A = a)/κ · x(f(x) − xᵀβ) and c2·I(A ≠ a)/(1 − κ) · x(f(x) − xᵀβ).
std::vector<double> app_score(std::span<const double> beta, const Predictor& f,
                              const CensoringModel& G, double kappa, const Observation& obs,
                              int outcome, int arm, const WeightConfig& c);

/// Sample mean of app_score over the dataset.
std::vector<double> mean_app_score(std::span<const double> beta, const Predictor& f,
                                   const CensoringModel& G, double kappa, const Dataset& d,
                                   int outcome, int arm, const WeightConfig& c);

inline constexpr double kMaxConditionNumber = 1e10;

/// Closed-form root of the averaged APP score:
///   β̂ = M⁻¹ v,
///   M = 1/n_a Σ_{A=a} (Δ/Ĝ) x xᵀ + c1/n_a Σ_{A=a} x xᵀ + c2/(n−n_a) Σ_{A≠a} x xᵀ,
///   v = 1/n_a Σ_{A=a} (Δ/Ĝ) x log y + c1/n_a Σ_{A=a} x f(x) + c2/(n−n_a) Σ_{A≠a} x f(x).
/// Throws SingularMatrixError when cond(M) exceeds kMaxConditionNumber.
MarginalFit solve_app_beta(const Dataset& d, int outcome, int arm, const Predictor& f,
                           const CensoringModel& G, double kappa, const WeightConfig& c);

/// Weighted root-mean-square residual with weights Δ_j / Ĝ.
double estimate_gamma(const Dataset& arm, int outcome, std::span<const double> beta,
                      const CensoringModel& G);

/// S(t | x) = 1 − Φ((log t − xᵀβ)/γ).
double marginal_survival(double t, std::span<const double> x, const MarginalFit& fit);

/// Lognormal density of T at t.
double marginal_density(double t, std::span<const double> x, const MarginalFit& fit);

}  // namespace bitr
