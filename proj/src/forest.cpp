#include "bitr/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bitr/numeric.hpp"

namespace bitr {

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  std::span<const double> y;
  std::vector<double> w;  // per-row weight inside this tree
  const ForestParams& params;
  Rng& rng;
  int p;
  int mtry;
  RegressionTree tree;

  int build(std::vector<std::size_t>& rows, int depth) {
    double sw = 0.0, swy = 0.0;
    for (auto r : rows) {
      sw += w[r];
      swy += w[r] * y[r];
    }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].value = swy / sw;
    tree.nodes[id].weight = sw;
    tree.nodes[id].count = static_cast<int>(row_mass(rows));

    if (depth >= params.max_depth || row_mass(rows) < 2.0 * params.min_leaf) return id;

    std::vector<int> features(p);
    std::iota(features.begin(), features.end(), 0);
    for (int k = 0; k < mtry; ++k) {
      const auto pick = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - k)));
      std::swap(features[k], features[pick]);
    }

    const double parent_sse_term = swy * swy / sw;
    double best_gain = 1e-12 * std::max(1.0, std::abs(parent_sse_term));
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::size_t> sorted = rows;
    for (int f = 0; f < mtry; ++f) {
      const int feat = features[f];
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return x[a][feat] < x[b][feat] || (x[a][feat] == x[b][feat] && a < b);
      });
      double lw = 0.0, lwy = 0.0, lmass = 0.0;
      const double total_mass = row_mass(rows);
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto r = sorted[i];
        lw += w[r];
        lwy += w[r] * y[r];
        lmass += mass(r);
        const double xv = x[r][feat];
        const double xn = x[sorted[i + 1]][feat];
        if (xv == xn) continue;
        const double rmass = total_mass - lmass;
        if (lmass < params.min_leaf || rmass < params.min_leaf) continue;
        const double rw = sw - lw;
        if (lw <= 0.0 || rw <= 0.0) continue;
        const double rwy = swy - lwy;
        const double gain = lwy * lwy / lw + rwy * rwy / rw - parent_sse_term;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = feat;
          best_threshold = 0.5 * (xv + xn);
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x[r][best_feature] <= best_threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[id].feature = best_feature;
    tree.nodes[id].threshold = best_threshold;
    const int l = build(left, depth + 1);
    const int rr = build(right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = rr;
    return id;
  }

  // Row multiplicity: bootstrap counts when resampling, else 1 per row.
  double mass(std::size_t r) const { return params.bootstrap ? w[r] : 1.0; }
  double row_mass(const std::vector<std::size_t>& rows) const {
    double m = 0.0;
    for (auto r : rows) m += mass(r);
    return m;
  }
};

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  int id = 0;
  while (nodes[id].feature >= 0)
    id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  return nodes[id].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature < 0) continue;
    d[nodes[i].left] = d[i] + 1;
    d[nodes[i].right] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

ForestPredictor::ForestPredictor(std::vector<RegressionTree> trees, ForestParams params, int p)
    : trees_(std::move(trees)), params_(params), p_(p) {}

double ForestPredictor::predict(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(x);
  return s / static_cast<double>(trees_.size());
}

ForestPredictor fit_weighted_forest(const std::vector<std::vector<double>>& x,
                                    std::span<const double> response,
                                    std::span<const double> weights, const ForestParams& params) {
  if (x.size() != response.size() || x.size() != weights.size())
    throw std::invalid_argument("forest: design, response and weights differ in length");
  if (params.n_trees < 1 || params.max_depth < 0 || params.min_leaf < 1 ||
      !(params.feature_subsample > 0.0 && params.feature_subsample <= 1.0))
    throw std::invalid_argument("forest: invalid hyperparameters");

  std::vector<std::size_t> positive;
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0 || !std::isfinite(weights[i]))
      throw std::invalid_argument("forest: weights must be finite and non-negative");
    if (weights[i] > 0.0) {
      positive.push_back(i);
      total += weights[i];
    }
  }
  if (positive.empty() || !(total > 0.0))
    throw FitError("forest: total training weight is zero");

  const int p = x.empty() ? 0 : static_cast<int>(x.front().size());
  const int mtry = std::clamp(static_cast<int>(std::lround(params.feature_subsample * p)), 1,
                              std::max(p, 1));

  // cumulative weights for proportional resampling
  std::vector<double> cdf(positive.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < positive.size(); ++k) {
    acc += weights[positive[k]];
    cdf[k] = acc;
  }

  std::vector<RegressionTree> trees;
  trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng tree_rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
    TreeBuilder b{x, response, std::vector<double>(x.size(), 0.0), params, tree_rng, p, mtry, {}};
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
      for (std::size_t draw = 0; draw < positive.size(); ++draw) {
        const double u = tree_rng.uniform() * acc;
        auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        k = std::min(k, positive.size() - 1);
        b.w[positive[k]] += 1.0;
      }
      for (auto r : positive)
        if (b.w[r] > 0.0) rows.push_back(r);
    } else {
      for (auto r : positive) b.w[r] = weights[r];
      rows = positive;
    }
    b.build(rows, 0);
    trees.push_back(std::move(b.tree));
  }
  return ForestPredictor(std::move(trees), params, p);
}

ForestPredictor fit_ipcw_forest(const Dataset& arm, int outcome, const CensoringModel& G,
                                const ForestParams& params) {
  std::vector<std::vector<double>> x;
  std::vector<double> y, w;
  x.reserve(arm.size());
  for (const auto& o : arm) {
    x.push_back(o.x);
    y.push_back(std::log(o.y(outcome)));
    w.push_back(o.delta(outcome) == 1 ? 1.0 / eval_G(G, o.y(outcome), o.x) : 0.0);
  }
  if (std::none_of(w.begin(), w.end(), [](double v) { return v > 0.0; }))
    throw FitError("forest: outcome " + std::to_string(outcome) + " has no uncensored rows");
  return fit_weighted_forest(x, y, w, params);
}

double LinearPredictor::predict(std::span<const double> x) const {
  double s = offset_;
  for (std::size_t k = 0; k < beta_.size(); ++k) s += beta_[k] * x[k];
  return s;
}

}  // namespace bitr
