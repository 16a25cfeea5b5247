#include "bitr/censoring.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bitr {

namespace {

struct Ordered {
  std::vector<double> log_y;
  std::vector<int> censored;  // 1 when delta_j == 0, i.e. the censoring "event"
  std::vector<std::size_t> order;  // ascending log_y
};

Ordered order_arm(const Dataset& arm, int outcome) {
  if (outcome != 1 && outcome != 2) throw std::invalid_argument("outcome must be 1 or 2");
  Ordered o;
  const std::size_t n = arm.size();
  o.log_y.resize(n);
  o.censored.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    o.log_y[i] = std::log(arm[i].y(outcome));
    o.censored[i] = arm[i].delta(outcome) == 0;
  }
  o.order.resize(n);
  std::iota(o.order.begin(), o.order.end(), 0);
  std::stable_sort(o.order.begin(), o.order.end(),
                   [&](std::size_t a, std::size_t b) { return o.log_y[a] < o.log_y[b]; });
  return o;
}

double linear_predictor(std::span<const double> coef, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * x[k];
  return s;
}

// Index of the last knot <= lt, or -1 when lt precedes every knot.
long knot_index(const std::vector<double>& knots, double lt) {
  auto it = std::upper_bound(knots.begin(), knots.end(), lt);
  return static_cast<long>(it - knots.begin()) - 1;
}

}  // namespace

std::string to_string(CensoringKind kind) {
  return kind == CensoringKind::KaplanMeier ? "km" : "cox";
}

CensoringKind censoring_kind_from_string(const std::string& s) {
  if (s == "km" || s == "kaplan-meier" || s == "KaplanMeier") return CensoringKind::KaplanMeier;
  if (s == "cox" || s == "coxph" || s == "CoxPH") return CensoringKind::CoxPH;
  throw std::invalid_argument("unknown censoring estimator '" + s + "' (expected km or cox)");
}

CensoringModel fit_km_censoring(const Dataset& arm, int outcome, double floor) {
  if (arm.empty()) throw FitError("censoring fit on an empty arm");
  auto o = order_arm(arm, outcome);
  const std::size_t n = arm.size();

  const bool any_event = std::any_of(o.censored.begin(), o.censored.end(),
                                     [](int c) { return c == 0; });
  if (!any_event)
    throw FitError("outcome " + std::to_string(outcome) +
                   ": every observation is censored, censoring distribution is degenerate");

  CensoringModel m;
  m.kind = CensoringKind::KaplanMeier;
  m.floor = floor;
  m.outcome = outcome;

  double surv = 1.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = o.log_y[o.order[i]];
    std::size_t at_risk = n - i;
    std::size_t events = 0;
    std::size_t j = i;
    while (j < n && o.log_y[o.order[j]] == t) {
      events += o.censored[o.order[j]];
      ++j;
    }
    if (events > 0) {
      surv *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      m.log_times.push_back(t);
      m.survival.push_back(surv);
    }
    i = j;
  }
  return m;
}

double cox_partial_loglik(const Dataset& arm, int outcome, std::span<const double> coef) {
  auto o = order_arm(arm, outcome);
  const std::size_t n = arm.size();
  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) eta[i] = linear_predictor(coef, arm[i].x);

  // Breslow: walk from the largest time down accumulating the risk set.
  double ll = 0.0;
  double risk = 0.0;
  std::size_t i = n;
  while (i > 0) {
    const double t = o.log_y[o.order[i - 1]];
    std::size_t j = i;
    while (j > 0 && o.log_y[o.order[j - 1]] == t) {
      risk += std::exp(eta[o.order[j - 1]]);
      --j;
    }
    for (std::size_t k = j; k < i; ++k) {
      const std::size_t r = o.order[k];
      if (o.censored[r]) ll += eta[r] - std::log(risk);
    }
    i = j;
  }
  return ll;
}

CensoringModel fit_cox_censoring(const Dataset& arm, int outcome, const CoxOptions& opts) {
  const int p = arm.p();
  const std::size_t n = arm.size();
  if (n < static_cast<std::size_t>(p + 2))
    throw FitError("Cox censoring fit needs at least p + 2 = " + std::to_string(p + 2) +
                   " rows, got " + std::to_string(n));
  auto o = order_arm(arm, outcome);
  if (std::none_of(o.censored.begin(), o.censored.end(), [](int c) { return c == 1; })) {
    // No censoring events: the baseline hazard is identically zero.
    CensoringModel m;
    m.kind = CensoringKind::CoxPH;
    m.coef.assign(p, 0.0);
    m.floor = opts.floor;
    m.outcome = outcome;
    return m;
  }

  Eigen::MatrixXd X(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < p; ++k) X(i, k) = arm[i].x[k];

  Eigen::VectorXd rho = Eigen::VectorXd::Zero(p);
  auto loglik = [&](const Eigen::VectorXd& b) {
    return cox_partial_loglik(arm, outcome, std::span<const double>(b.data(), p));
  };

  double ll = loglik(rho);
  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iter; ++iter) {
    Eigen::VectorXd eta = X * rho;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);

    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    std::size_t i = n;
    while (i > 0) {
      const double t = o.log_y[o.order[i - 1]];
      std::size_t j = i;
      while (j > 0 && o.log_y[o.order[j - 1]] == t) {
        const std::size_t r = o.order[j - 1];
        const double w = std::exp(eta(r));
        s0 += w;
        s1 += w * X.row(r).transpose();
        s2 += w * X.row(r).transpose() * X.row(r);
        --j;
      }
      for (std::size_t k = j; k < i; ++k) {
        const std::size_t r = o.order[k];
        if (!o.censored[r]) continue;
        const Eigen::VectorXd mean = s1 / s0;
        grad += X.row(r).transpose() - mean;
        info += s2 / s0 - mean * mean.transpose();
      }
      i = j;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(info);
    const auto& sv = svd.singularValues();
    if (ldlt.info() != Eigen::Success || sv(p - 1) <= 1e-12 * std::max(1.0, sv(0)))
      throw SingularMatrixError("Cox censoring fit (outcome " + std::to_string(outcome) +
                                "): information matrix is singular");
    Eigen::VectorXd step = ldlt.solve(grad);

    // Step halving keeps the partial likelihood non-decreasing.
    double scale = 1.0;
    Eigen::VectorXd next = rho + step;
    double ll_next = loglik(next);
    while (!(ll_next >= ll - 1e-12) && scale > 1e-6) {
      scale *= 0.5;
      next = rho + scale * step;
      ll_next = loglik(next);
    }
    const double change = (next - rho).cwiseAbs().maxCoeff();
    rho = next;
    const double ll_prev = ll;
    ll = ll_next;
    if (!rho.allFinite() || rho.cwiseAbs().maxCoeff() > 1e3)
      throw FitError("Cox censoring fit (outcome " + std::to_string(outcome) +
                     "): Newton iterates diverged");
    if (change < opts.tol || std::abs(ll - ll_prev) < opts.tol * (1.0 + std::abs(ll))) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged)
    throw FitError("Cox censoring fit (outcome " + std::to_string(outcome) +
                   "): no convergence after " + std::to_string(opts.max_iter) + " iterations");

  CensoringModel m;
  m.kind = CensoringKind::CoxPH;
  m.coef.assign(rho.data(), rho.data() + p);
  m.floor = opts.floor;
  m.outcome = outcome;
  m.iterations = iter;

  // Breslow baseline cumulative hazard at each distinct censoring time.
  Eigen::VectorXd w = (X * rho).array().exp();
  double cum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = o.log_y[o.order[i]];
    std::size_t j = i;
    std::size_t events = 0;
    while (j < n && o.log_y[o.order[j]] == t) {
      events += o.censored[o.order[j]];
      ++j;
    }
    if (events > 0) {
      double risk = 0.0;
      for (std::size_t k = i; k < n; ++k) risk += w(o.order[k]);
      cum += static_cast<double>(events) / risk;
      m.log_times.push_back(t);
      m.survival.push_back(cum);
    }
    i = j;
  }
  return m;
}

CensoringModel fit_censoring(const Dataset& arm, int outcome, CensoringKind kind, double floor) {
  if (kind == CensoringKind::KaplanMeier) return fit_km_censoring(arm, outcome, floor);
  CoxOptions opts;
  opts.floor = floor;
  return fit_cox_censoring(arm, outcome, opts);
}

double eval_G(const CensoringModel& m, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_G requires t > 0");
  const long k = knot_index(m.log_times, std::log(t));
  double g = 1.0;
  if (m.kind == CensoringKind::KaplanMeier) {
    if (k >= 0) g = m.survival[k];
  } else {
    const double cumhaz = k >= 0 ? m.survival[k] : 0.0;
    g = std::exp(-cumhaz * std::exp(linear_predictor(m.coef, x)));
  }
  return std::clamp(g, m.floor, 1.0);
}

}  // namespace bitr
