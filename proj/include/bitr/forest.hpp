#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bitr/censoring.hpp"
#include "bitr/data.hpp"

namespace bitr {

/// Anything that maps covariates to a predicted mean log event time.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(std::span<const double> x) const = 0;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 6;
  int min_leaf = 5;
  double feature_subsample = 1.0;
  bool bootstrap = true;
  std::uint64_t seed = 1;
};

/// Flat binary regression tree. Leaves have feature == -1 and carry the
/// weighted mean response in `value`.
struct RegressionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double weight = 0.0;
    int count = 0;
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
};

/// Random forest whose per-node criterion is weighted squared error.
/// Prediction is the unweighted mean over trees.
class ForestPredictor final : public Predictor {
 public:
  ForestPredictor() = default;
  ForestPredictor(std::vector<RegressionTree> trees, ForestParams params, int p);

  double predict(std::span<const double> x) const override;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  int p() const { return p_; }

 private:
  std::vector<RegressionTree> trees_;
  ForestParams params_;
  int p_ = 0;
};

/// Weighted forest on an explicit design. Rows with zero weight never enter
/// a tree. With bootstrap on, each tree draws as many rows as there are
/// positive-weight rows, with probability proportional to weight, and then
/// uses unit weights; otherwise every tree sees the raw weights.
ForestPredictor fit_weighted_forest(const std::vector<std::vector<double>>& x,
                                    std::span<const double> response,
                                    std::span<const double> weights, const ForestParams& params);

/// Forest for log y_j on x with IPCW weights delta_j / Ĝ(y_j, x).
ForestPredictor fit_ipcw_forest(const Dataset& arm, int outcome, const CensoringModel& G,
                                const ForestParams& params = {});

/// Predictor given by a fixed linear index xᵀβ, plus an optional offset.
class LinearPredictor final : public Predictor {
 public:
  explicit LinearPredictor(std::vector<double> beta, double offset = 0.0)
      : beta_(std::move(beta)), offset_(offset) {}
  double predict(std::span<const double> x) const override;

 private:
  std::vector<double> beta_;
  double offset_;
};

/// Wraps another predictor and adds a constant.
class ShiftedPredictor final : public Predictor {
 public:
  ShiftedPredictor(const Predictor& base, double shift) : base_(base), shift_(shift) {}
  double predict(std::span<const double> x) const override {
    return base_.predict(x) + shift_;
  }

 private:
  const Predictor& base_;
  double shift_;
};

}  // namespace bitr
