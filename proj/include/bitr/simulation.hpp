#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bitr/data.hpp"
#include "bitr/itr.hpp"
#include "bitr/numeric.hpp"

namespace bitr {

enum class Scenario { Main, Case1, Case2 };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// Data-generating process for the three-arm, two-covariate studies.
///
/// Main:  log T_j(a) = xᵀβ_ja + x₂² + ε_j
/// Case1: log T_j(a) = xᵀβ_ja + |x_j|·ε_j
/// Case2: log T_j(a) = xᵀβ_ja + ε_j
/// with (ε_1, ε_2) standard normal scores joined by a Clayton(θ_a) survival
/// copula, and censoring C_j ~ Uniform(−τ_j, 2τ_j) on the log scale.
struct ScenarioSpec {
  Scenario tag = Scenario::Main;
  int n = 200;
  int K = 2;
  int p = 2;
  // beta[outcome - 1][arm]
  std::array<std::array<std::array<double, 2>, 3>, 2> beta{{
      {{{1.5, 1.0}, {-1.5, 1.0}, {0.0, -2.0}}},
      {{{1.0, 1.5}, {-1.0, 1.5}, {0.0, -2.0}}},
  }};
  std::array<double, 3> theta{2.0, 2.5, 3.0};
  double x_lo = -2.8;
  double x_hi = 2.8;
  double t1 = 1.0;
  double t2 = 1.0;
  std::optional<double> tau1;
  std::optional<double> tau2;
  std::uint64_t seed = 20240601;
  /// Sensitivity switch: independent errors instead of Clayton-linked ones.
  bool independent_errors = false;
};

ScenarioSpec make_scenario(Scenario tag, int n = 200);

/// Mean and scale of log T_j(a) given x.
double log_time_mean(const ScenarioSpec& spec, std::span<const double> x, int outcome, int arm);
double log_time_scale(const ScenarioSpec& spec, std::span<const double> x, int outcome);

inline constexpr double kMinErrorScale = 1e-6;

double true_marginal_survival(const ScenarioSpec& spec, double t, std::span<const double> x,
                              int outcome, int arm);

/// True S(t1, t2 | x, a): Clayton(θ_a) link of the true marginals.
double true_joint_survival(const ScenarioSpec& spec, double t1, double t2,
                           std::span<const double> x, int arm);

std::vector<double> true_survival_vector(const ScenarioSpec& spec, std::span<const double> x);

/// argmax_a S(t1*, t2* | x, a), ties to the smallest arm.
int oracle_policy(const ScenarioSpec& spec, std::span<const double> x);

/// One draw (U, V) from the Clayton copula by conditional inversion.
std::pair<double, double> clayton_sample(double theta, Rng& rng);

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TauPair {
  double tau1 = 0.0;
  double tau2 = 0.0;
};

struct CalibrationOptions {
  std::size_t pilot = 50000;
  double target = 0.5;
  double tolerance = 0.01;
  double lo = 1e-3;
  double hi = 1e3;
};

/// Empirical censoring rate of outcome j at a given τ on a pilot sample.
double censoring_rate(const ScenarioSpec& spec, int outcome, double tau, std::size_t pilot,
                      std::uint64_t seed);

/// Bisection on τ per outcome so that the pilot censoring rate hits the
/// target within tolerance. Throws CalibrationError when the target is not
/// attainable on the bracket.
TauPair calibrate_tau(const ScenarioSpec& spec, const CalibrationOptions& opts = {});

/// τ actually used for data generation: explicit values when set; otherwise
/// the calibrated Main-scenario value, which Case 1 and Case 2 share
/// because their symmetric log-times cannot reach 50% censoring under
/// Uniform(−τ, 2τ) censoring.
TauPair resolve_tau(const ScenarioSpec& spec);

Dataset generate_dataset(const ScenarioSpec& spec, std::uint64_t seed);

std::vector<std::vector<double>> generate_covariates(const ScenarioSpec& spec, std::size_t n,
                                                     std::uint64_t seed);

double compute_otia(std::span<const int> decisions, std::span<const int> oracle);

struct ReplicationOptions {
  int R = 100;
  int n_test = 1000;
  int jobs = 1;
  double max_failure_fraction = 0.10;
  ItrOptions itr;
};

/// Outcome of one replication under one weight configuration.
struct ReplicationRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double otia = 0.0;
  /// β̂ laid out as [arm][outcome][component], length (K+1)·2·p.
  std::vector<double> beta_hat;
  double seconds = 0.0;
};

struct ConfigSummary {
  WeightConfig c;
  double mean_otia = 0.0;
  int failures = 0;
  std::vector<double> bias;  // |mean β̂ − β|, same layout as beta_hat
  std::vector<double> ssd;   // sample SD, divisor R_ok − 1
  std::vector<ReplicationRecord> records;
};

struct ReplicationReport {
  ScenarioSpec spec;
  TauPair tau;
  int R = 0;
  int n_test = 0;
  std::vector<ConfigSummary> configs;
};

class ReplicationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The full pipeline, R times: each replication draws a training and
/// a test set, fits the nuisance models once, and then runs every weight
/// configuration on the same data.
ReplicationReport run_replications(const ScenarioSpec& spec, const std::vector<WeightConfig>& configs,
                                   const ReplicationOptions& opts);

/// Flat index into ReplicationRecord::beta_hat.
inline std::size_t coef_index(int arm, int outcome, int component, int p = 2) {
  return (static_cast<std::size_t>(arm) * 2 + static_cast<std::size_t>(outcome - 1)) * p +
         static_cast<std::size_t>(component);
}

std::string report_csv(const ReplicationReport& report);
std::string report_summary(const ReplicationReport& report);

}  // namespace bitr
