#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitr/data.hpp"

namespace bitr {

/// Raised when a censoring model cannot be fitted from the data at hand
/// (no events of the required kind, or a non-convergent Newton iteration).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a normal-equations or information matrix is singular.
class SingularMatrixError : public FitError {
 public:
  using FitError::FitError;
};

enum class CensoringKind { KaplanMeier, CoxPH };

std::string to_string(CensoringKind kind);
CensoringKind censoring_kind_from_string(const std::string& s);

inline constexpr double kDefaultWeightFloor = 0.02;

/// Estimated probability of remaining uncensored past t, for one
/// (outcome, arm) pair. Jump times live on the log-time scale; callers pass
/// natural-scale times to eval_G.
///
/// Kaplan-Meier: `survival[k]` holds the value on [log_times[k], log_times[k+1]).
/// Cox PH: `survival` holds the Breslow baseline cumulative hazard at the
/// same knots and `coef` the log-hazard coefficients.
struct CensoringModel {
  CensoringKind kind = CensoringKind::KaplanMeier;
  std::vector<double> log_times;
  std::vector<double> survival;
  std::vector<double> coef;
  double floor = kDefaultWeightFloor;
  int outcome = 1;
  int iterations = 0;
};

/// Product-limit estimate of the censoring survival, treating delta_j = 0 as
/// the event. At tied times censorings are counted against a risk set that
/// still includes the failures at that time.
CensoringModel fit_km_censoring(const Dataset& arm, int outcome,
                                double floor = kDefaultWeightFloor);

struct CoxOptions {
  int max_iter = 50;
  double tol = 1e-9;
  double floor = kDefaultWeightFloor;
};

/// Cox proportional-hazards fit for the censoring time (Newton-Raphson on
/// the Breslow partial likelihood) with a Breslow baseline hazard.
CensoringModel fit_cox_censoring(const Dataset& arm, int outcome, const CoxOptions& opts = {});

/// Fits with the given kind.
CensoringModel fit_censoring(const Dataset& arm, int outcome, CensoringKind kind,
                             double floor = kDefaultWeightFloor);

/// Ĝ(t, x) clamped to [floor, 1]. The Kaplan-Meier kind ignores x.
double eval_G(const CensoringModel& m, double t, std::span<const double> x);

/// Breslow partial log-likelihood of a Cox model with coefficients `coef`,
/// treating delta_j = 0 as the event. Exposed for tests and diagnostics.
double cox_partial_loglik(const Dataset& arm, int outcome, std::span<const double> coef);

}  // namespace bitr
