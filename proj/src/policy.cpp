#include "bitr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bitr/numeric.hpp"

namespace bitr {

namespace {

void check_sample(const PolicyNetwork& net, const PolicySample& s) {
  if (static_cast<int>(s.x.size()) != net.input_dim())
    throw ShapeError("covariate length " + std::to_string(s.x.size()) + " != network input " +
                     std::to_string(net.input_dim()));
  if (static_cast<int>(s.s.size()) != net.n_arms())
    throw ShapeError("survival vector length " + std::to_string(s.s.size()) +
                     " != number of arms " + std::to_string(net.n_arms()));
}

// Forward pass over a column batch; keeps the post-activation of every layer.
void forward(const PolicyNetwork& net, const Eigen::MatrixXd& X,
             std::vector<Eigen::MatrixXd>& acts) {
  const std::size_t L = net.weights.size();
  acts.resize(L + 1);
  acts[0] = X;
  for (std::size_t l = 0; l < L; ++l) {
    acts[l + 1] = (net.weights[l] * acts[l]).colwise() + net.biases[l];
    if (l + 1 < L) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }
}

void column_softmax(Eigen::MatrixXd& z) {
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    auto col = z.col(i);
    col.array() -= col.maxCoeff();
    col = col.array().exp();
    col /= col.sum();
  }
}

void pack(std::span<const PolicySample> batch, std::span<const std::size_t> idx, int p, int k,
          Eigen::MatrixXd& X, Eigen::MatrixXd& S) {
  X.resize(p, static_cast<Eigen::Index>(idx.size()));
  S.resize(k, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const auto& row = batch[idx[c]];
    for (int j = 0; j < p; ++j) X(j, c) = row.x[j];
    for (int j = 0; j < k; ++j) S(j, c) = row.s[j];
  }
}

double loss_and_grad(const PolicyNetwork& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& S,
                     Gradient* grad, std::vector<Eigen::MatrixXd>& acts) {
  forward(net, X, acts);
  Eigen::MatrixXd pi = acts.back();
  column_softmax(pi);
  const double B = static_cast<double>(X.cols());
  const Eigen::RowVectorXd value = (S.cwiseProduct(pi)).colwise().sum();
  const double loss = -value.sum() / B;
  if (!grad) return loss;

  // dL/dz = −(1/B) π ⊙ (s − sᵀπ)
  Eigen::MatrixXd delta = S;
  delta.rowwise() -= value;
  delta = -(pi.cwiseProduct(delta)) / B;

  const std::size_t L = net.weights.size();
  grad->weights.resize(L);
  grad->biases.resize(L);
  for (std::size_t l = L; l-- > 0;) {
    grad->weights[l] = delta * acts[l].transpose();
    grad->biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = net.weights[l].transpose() * delta;
      delta = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

}  // namespace

std::size_t PolicyNetwork::n_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

std::vector<double> PolicyNetwork::flat_params() const {
  std::vector<double> out;
  out.reserve(n_params());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) out.push_back(weights[l](r, c));
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) out.push_back(biases[l](r));
  }
  return out;
}

void PolicyNetwork::set_flat_params(std::span<const double> params) {
  if (params.size() != n_params())
    throw ShapeError("expected " + std::to_string(n_params()) + " parameters, got " +
                     std::to_string(params.size()));
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) weights[l](r, c) = params[k++];
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l](r) = params[k++];
  }
}

std::vector<double> Gradient::flat() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) out.push_back(weights[l](r, c));
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) out.push_back(biases[l](r));
  }
  return out;
}

PolicyNetwork zero_network(int p, int K, int width, int hidden_layers) {
  if (p < 1 || K < 1 || width < 1 || hidden_layers < 0)
    throw std::invalid_argument("network dimensions must be positive");
  PolicyNetwork net;
  net.dims.push_back(p);
  for (int h = 0; h < hidden_layers; ++h) net.dims.push_back(width);
  net.dims.push_back(K + 1);
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    net.weights.push_back(Eigen::MatrixXd::Zero(net.dims[l + 1], net.dims[l]));
    net.biases.push_back(Eigen::VectorXd::Zero(net.dims[l + 1]));
  }
  return net;
}

PolicyNetwork init_network(int p, int K, int width, std::uint64_t seed, int hidden_layers) {
  PolicyNetwork net = zero_network(p, K, width, hidden_layers);
  Rng rng(seed);
  for (auto& W : net.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(W.cols()));
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = rng.uniform(-limit, limit);
  }
  return net;
}

Eigen::VectorXd logits(const PolicyNetwork& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim())
    throw ShapeError("covariate length " + std::to_string(x.size()) + " != network input " +
                     std::to_string(net.input_dim()));
  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const std::size_t L = net.weights.size();
  for (std::size_t l = 0; l < L; ++l) {
    h = net.weights[l] * h + net.biases[l];
    if (l + 1 < L) h = h.cwiseMax(0.0);
  }
  return h;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

std::vector<double> policy(const PolicyNetwork& net, std::span<const double> x) {
  const Eigen::VectorXd pr = softmax(logits(net, x));
  return {pr.data(), pr.data() + pr.size()};
}

int argmax_first(std::span<const double> values) {
  int best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = static_cast<int>(k);
  return best;
}

int decide(const PolicyNetwork& net, std::span<const double> x) {
  const Eigen::VectorXd z = logits(net, x);
  return argmax_first(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

double empirical_value_loss(const PolicyNetwork& net, std::span<const PolicySample> batch) {
  if (batch.empty()) throw ShapeError("empty batch");
  for (const auto& s : batch) check_sample(net, s);
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd X, S;
  pack(batch, idx, net.input_dim(), net.n_arms(), X, S);
  std::vector<Eigen::MatrixXd> acts;
  return loss_and_grad(net, X, S, nullptr, acts);
}

double value_loss_and_gradient(const PolicyNetwork& net, std::span<const PolicySample> batch,
                               Gradient& grad) {
  if (batch.empty()) throw ShapeError("empty batch");
  for (const auto& s : batch) check_sample(net, s);
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd X, S;
  pack(batch, idx, net.input_dim(), net.n_arms(), X, S);
  std::vector<Eigen::MatrixXd> acts;
  return loss_and_grad(net, X, S, &grad, acts);
}

TrainResult train(PolicyNetwork net, std::span<const PolicySample> data, const TrainConfig& cfg) {
  if (data.empty()) throw ShapeError("training data is empty");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.learning_rate < 0.0)
    throw std::invalid_argument("invalid training configuration");
  for (const auto& s : data) check_sample(net, s);

  const int p = net.input_dim();
  const int k = net.n_arms();
  const std::size_t n = data.size();
  const std::size_t L = net.weights.size();

  std::vector<Eigen::MatrixXd> mW(L), vW(L);
  std::vector<Eigen::VectorXd> mb(L), vb(L);
  for (std::size_t l = 0; l < L; ++l) {
    mW[l] = vW[l] = Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols());
    mb[l] = vb[l] = Eigen::VectorXd::Zero(net.biases[l].size());
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  Eigen::MatrixXd Xall, Sall;
  pack(data, all, p, k, Xall, Sall);

  TrainResult result;
  result.loss_history.reserve(cfg.epochs);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order = all;
  std::vector<Eigen::MatrixXd> acts;
  Gradient grad;
  Eigen::MatrixXd Xb, Sb;
  long step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      pack(data, std::span<const std::size_t>(order.data() + start, stop - start), p, k, Xb, Sb);
      const double loss = loss_and_grad(net, Xb, Sb, &grad, acts);
      if (!std::isfinite(loss))
        throw DivergenceError("policy training diverged at epoch " + std::to_string(epoch + 1));
      ++step;
      const double lr = cfg.learning_rate;
      if (cfg.optimizer == Optimizer::Adam) {
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        for (std::size_t l = 0; l < L; ++l) {
          mW[l] = cfg.beta1 * mW[l] + (1.0 - cfg.beta1) * grad.weights[l];
          vW[l] = cfg.beta2 * vW[l] + (1.0 - cfg.beta2) * grad.weights[l].cwiseAbs2();
          mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * grad.biases[l];
          vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * grad.biases[l].cwiseAbs2();
          net.weights[l].array() -=
              lr * (mW[l].array() / c1) / ((vW[l].array() / c2).sqrt() + cfg.epsilon);
          net.biases[l].array() -=
              lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + cfg.epsilon);
        }
      } else {
        for (std::size_t l = 0; l < L; ++l) {
          net.weights[l] -= lr * grad.weights[l];
          net.biases[l] -= lr * grad.biases[l];
        }
      }
      if (cfg.weight_clip) {
        const double c = *cfg.weight_clip;
        for (std::size_t l = 0; l < L; ++l) {
          net.weights[l] = net.weights[l].cwiseMax(-c).cwiseMin(c);
          net.biases[l] = net.biases[l].cwiseMax(-c).cwiseMin(c);
        }
      }
    }
    const double full = loss_and_grad(net, Xall, Sall, nullptr, acts);
    if (!std::isfinite(full))
      throw DivergenceError("policy training diverged at epoch " + std::to_string(epoch + 1));
    result.loss_history.push_back(full);
  }
  result.net = std::move(net);
  return result;
}

}  // namespace bitr
