#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitr {

/// ReLU multilayer perceptron producing K+1 treatment logits.
/// weights[l] has shape dims[l+1] x dims[l].
struct PolicyNetwork {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return dims.front(); }
  int n_arms() const { return dims.back(); }
  std::size_t n_params() const;

  std::vector<double> flat_params() const;
  void set_flat_params(std::span<const double> params);
};

enum class Optimizer { Adam, SGD };

struct TrainConfig {
  int epochs = 500;
  int batch_size = 64;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  std::optional<double> weight_clip;
};

/// One training row: covariates and the estimated joint survival of each arm.
struct PolicySample {
  std::vector<double> x;
  std::vector<double> s;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// He-uniform weights, zero biases, `hidden_layers` hidden layers of `width`.
PolicyNetwork init_network(int p, int K, int width, std::uint64_t seed, int hidden_layers = 2);

/// All-zero network; its policy is uniform everywhere.
PolicyNetwork zero_network(int p, int K, int width, int hidden_layers = 2);

Eigen::VectorXd logits(const PolicyNetwork& net, std::span<const double> x);

/// Max-shifted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& z);

/// σ_S(H(x)).
std::vector<double> policy(const PolicyNetwork& net, std::span<const double> x);

/// Smallest index attaining the maximum.
int argmax_first(std::span<const double> values);
int decide(const PolicyNetwork& net, std::span<const double> x);

/// −mean_i sᵢᵀ σ_S(H(xᵢ)).
double empirical_value_loss(const PolicyNetwork& net, std::span<const PolicySample> batch);

struct Gradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<double> flat() const;
};

/// Loss and its analytic gradient over `batch`.
double value_loss_and_gradient(const PolicyNetwork& net, std::span<const PolicySample> batch,
                               Gradient& grad);

struct TrainResult {
  PolicyNetwork net;
  std::vector<double> loss_history;  // full-data loss after each epoch
};

/// Minibatch optimization of empirical_value_loss. Throws DivergenceError
/// on a non-finite loss.
TrainResult train(PolicyNetwork net, std::span<const PolicySample> data, const TrainConfig& cfg);

}  // namespace bitr
