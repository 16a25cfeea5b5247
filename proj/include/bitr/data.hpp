#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitr {

/// Thrown when a record or dataset breaks one of its invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an input file cannot be parsed; the message names the line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by split_by_arm when the requested arm has no rows.
class EmptyArmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One subject: two observed times on the natural scale, their event
// indicators, covariates and the received arm.
struct Observation {
  double y1 = 1.0;
  double y2 = 1.0;
  int delta1 = 1;
  int delta2 = 1;
  std::vector<double> x;
  int a = 0;

  double y(int outcome) const { return outcome == 1 ? y1 : y2; }
  int delta(int outcome) const { return outcome == 1 ? delta1 : delta2; }
};

/// Immutable collection of observations sharing covariate dimension p and
/// arm range {0..K}.
class Dataset {
 public:
  Dataset() = default;

  /// Validates every row. When `K` is negative it is inferred as the
  /// largest arm present; an explicit K smaller than a present arm is an
  /// error.
  Dataset(std::vector<Observation> observations, int p, int K = -1);

  const std::vector<Observation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  bool empty() const { return obs_.empty(); }
  int p() const { return p_; }
  int K() const { return K_; }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }

  auto begin() const { return obs_.begin(); }
  auto end() const { return obs_.end(); }

  std::size_t arm_size(int a) const;

 private:
  std::vector<Observation> obs_;
  int p_ = 0;
  int K_ = 0;
};

/// User weights (c1, c2) for the prediction terms of the estimating equation.
struct WeightConfig {
  double c1 = 0.0;
  double c2 = 0.0;

  WeightConfig() = default;
  WeightConfig(double c1_, double c2_);

  std::string label() const;
  friend bool operator==(const WeightConfig&, const WeightConfig&) = default;
};

/// Reads `y1,y2,d1,d2,a,x1..xp`. `expected_K >= 0` pins the arm range.
Dataset load_dataset(const std::filesystem::path& path, int expected_K = -1);
Dataset parse_dataset(const std::string& text, int expected_K = -1);

/// Covariate rows from any CSV whose header carries x1..xp; other columns
/// are ignored. A data file in the format above is accepted as is.
std::vector<std::vector<double>> parse_covariates(const std::string& text);
std::vector<std::vector<double>> load_covariates(const std::filesystem::path& path);

void save_dataset(const Dataset& d, const std::filesystem::path& path);
std::string format_dataset(const Dataset& d);

/// Rows with arm `a`, in original order.
Dataset split_by_arm(const Dataset& d, int a);

struct ValidationReport {
  std::size_t n = 0;
  int p = 0;
  int K = 0;
  bool empty = true;
  std::map<int, std::size_t> arm_sizes;
  // arm -> {rate for outcome 1, rate for outcome 2}
  std::map<int, std::pair<double, double>> censoring_rates;
  double overall_censoring1 = 0.0;
  double overall_censoring2 = 0.0;
  std::vector<std::pair<double, double>> covariate_ranges;

  std::string to_string() const;
};

ValidationReport validate(const Dataset& d);

/// Full-precision decimal rendering used by every text writer.
std::string format_double(double v);

}  // namespace bitr
