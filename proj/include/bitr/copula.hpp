#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitr/censoring.hpp"
#include "bitr/data.hpp"
#include "bitr/marginal.hpp"

namespace bitr {

enum class CopulaFamily { Clayton, Gumbel, Frank };

std::string to_string(CopulaFamily f);
CopulaFamily copula_family_from_string(const std::string& s);

inline const std::vector<CopulaFamily> kAllFamilies = {CopulaFamily::Clayton,
                                                       CopulaFamily::Gumbel, CopulaFamily::Frank};

class CopulaDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Throws CopulaDomainError when theta lies outside the family's domain.
void check_theta(CopulaFamily fam, double theta);

/// Joint survival link L(u, v; θ).
double link_eval(CopulaFamily fam, double u, double v, double theta);

/// Mixed partial ∂²L/∂u∂v.
double copula_density(CopulaFamily fam, double u, double v, double theta);
double log_copula_density(CopulaFamily fam, double u, double v, double theta);

struct CopulaFit {
  CopulaFamily family = CopulaFamily::Clayton;
  double theta = 1.0;
  int arm = 0;
  double neg_loglik = 0.0;
  bool at_boundary = false;
  /// Best objective value after each golden-section iteration.
  std::vector<double> trace;
};

double joint_survival(double t1, double t2, std::span<const double> x, const MarginalFit& m1,
                      const MarginalFit& m2, const CopulaFit& cf);

struct ThetaBracket {
  double lo;
  double hi;
};

/// Search interval for θ per family.
ThetaBracket theta_bracket(CopulaFamily fam);

/// Pairwise IPCW pseudo-likelihood term inputs, precomputed per row.
struct PseudoObs {
  double u;
  double v;
  double weight;        // Δ1Δ2 / (Ĝ1 Ĝ2)
  double log_marginals; // log f1(y1) + log f2(y2)
};

std::vector<PseudoObs> pseudo_observations(const Dataset& arm, const MarginalFit& m1,
                                           const MarginalFit& m2, const CensoringModel& G1,
                                           const CensoringModel& G2);

/// −Σ w log c_θ(u, v) over the given rows.
double copula_objective(CopulaFamily fam, double theta, std::span<const PseudoObs> rows);

/// Full negative weighted pseudo-log-likelihood, including the θ-free
/// marginal density terms.
double copula_neg_loglik(CopulaFamily fam, double theta, std::span<const PseudoObs> rows);

class InsufficientDataError : public FitError {
 public:
  using FitError::FitError;
};

/// θ̂ on precomputed rows.
CopulaFit fit_theta_rows(std::span<const PseudoObs> rows, CopulaFamily fam, int arm = 0);

CopulaFit fit_theta(const Dataset& arm, const MarginalFit& m1, const MarginalFit& m2,
                    const CensoringModel& G1, const CensoringModel& G2, CopulaFamily fam);

struct LinkSelection {
  CopulaFamily family = CopulaFamily::Clayton;
  std::vector<double> cv_risk;  // aligned with the candidate list
};

/// K-fold cross-validated choice among `candidates` by held-out negative
/// weighted pseudo-log-likelihood, θ refit on each training fold.
/// Doubly-uncensored rows are spread evenly across folds.
LinkSelection select_link_cv(const Dataset& arm, const MarginalFit& m1, const MarginalFit& m2,
                             const CensoringModel& G1, const CensoringModel& G2,
                             const std::vector<CopulaFamily>& candidates, int folds = 5,
                             std::uint64_t seed = 1);

}  // namespace bitr
