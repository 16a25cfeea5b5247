#include "bitr/copula.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "bitr/numeric.hpp"

namespace bitr {

namespace {

constexpr double kFrankZero = 1e-6;
constexpr double kProbClamp = 1e-12;

void check_unit(double u, double v, bool open) {
  const bool ok = open ? (u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)
                       : (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0);
  if (!ok)
    throw CopulaDomainError("copula arguments must lie in " +
                            std::string(open ? "(0, 1)" : "[0, 1]") + ", got u = " +
                            format_double(u) + ", v = " + format_double(v));
}

double clayton_log_link(double lu, double lv, double theta) {
  // A - 1 = expm1(-θ ln u) + expm1(-θ ln v), stable as θ -> 0
  const double am1 = std::expm1(-theta * lu) + std::expm1(-theta * lv);
  return -std::log1p(am1) / theta;
}

double log_density_unchecked(CopulaFamily fam, double u, double v, double theta) {
  const double lu = std::log(u);
  const double lv = std::log(v);
  switch (fam) {
    case CopulaFamily::Clayton: {
      const double log_a = std::log1p(std::expm1(-theta * lu) + std::expm1(-theta * lv));
      return std::log1p(theta) - (theta + 1.0) * (lu + lv) - (1.0 / theta + 2.0) * log_a;
    }
    case CopulaFamily::Gumbel: {
      const double x = -lu, y = -lv;
      const double lx = std::log(x), ly = std::log(y);
      // log A = log(x^θ + y^θ) computed around the larger term
      const double m = std::max(theta * lx, theta * ly);
      const double log_a = m + std::log(std::exp(theta * lx - m) + std::exp(theta * ly - m));
      const double a_inv = std::exp(log_a / theta);  // A^{1/θ}
      return -a_inv - lu - lv + (theta - 1.0) * (lx + ly) + (1.0 / theta - 2.0) * log_a +
             std::log(a_inv + theta - 1.0);
    }
    case CopulaFamily::Frank: {
      if (std::abs(theta) < kFrankZero) return 0.0;
      const double a = -std::expm1(-theta);
      const double bu = -std::expm1(-theta * u);
      const double bv = -std::expm1(-theta * v);
      const double d = a - bu * bv;
      return std::log(theta * a) - theta * (u + v) - 2.0 * std::log(std::abs(d));
    }
  }
  return 0.0;
}

// Parameter transforms: the search runs on s, θ = to_theta(s).
double to_theta(CopulaFamily fam, double s) {
  switch (fam) {
    case CopulaFamily::Clayton: return std::exp(s);
    case CopulaFamily::Gumbel: return 1.0 + std::exp(s);
    case CopulaFamily::Frank: return s;
  }
  return s;
}

double to_search(CopulaFamily fam, double theta) {
  switch (fam) {
    case CopulaFamily::Clayton: return std::log(theta);
    case CopulaFamily::Gumbel: return std::log(theta - 1.0);
    case CopulaFamily::Frank: return theta;
  }
  return theta;
}

struct GoldenResult {
  double lo, hi, best_x, best_f;
};

GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol, std::vector<double>& trace) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
    trace.push_back(std::min(f1, f2));
  }
  return f1 <= f2 ? GoldenResult{lo, hi, x1, f1} : GoldenResult{lo, hi, x2, f2};
}

// Brent's parabolic-interpolation minimizer on [a, b].
std::pair<double, double> brent_minimize(const std::function<double(double)>& f, double a,
                                         double b, double x0, double f0, double tol) {
  const double cgold = 0.3819660112501051;
  double x = x0, w = x0, v = x0;
  double fx = f0, fw = f0, fv = f0;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + 1e-12;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = xm >= x ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = x >= xm ? a - x : b - x;
      d = cgold * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d >= 0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx};
}

}  // namespace

std::string to_string(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::Frank: return "frank";
  }
  return "?";
}

CopulaFamily copula_family_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "clayton") return CopulaFamily::Clayton;
  if (t == "gumbel") return CopulaFamily::Gumbel;
  if (t == "frank") return CopulaFamily::Frank;
  throw std::invalid_argument("unknown copula family '" + s + "'");
}

void check_theta(CopulaFamily fam, double theta) {
  bool ok = std::isfinite(theta);
  switch (fam) {
    case CopulaFamily::Clayton: ok = ok && theta > 0.0; break;
    case CopulaFamily::Gumbel: ok = ok && theta >= 1.0; break;
    case CopulaFamily::Frank: ok = ok && theta != 0.0; break;
  }
  if (!ok)
    throw CopulaDomainError("theta = " + format_double(theta) + " outside the " + to_string(fam) +
                            " domain");
}

double link_eval(CopulaFamily fam, double u, double v, double theta) {
  check_theta(fam, theta);
  check_unit(u, v, false);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  double out = 0.0;
  switch (fam) {
    case CopulaFamily::Clayton:
      out = std::exp(clayton_log_link(std::log(u), std::log(v), theta));
      break;
    case CopulaFamily::Gumbel: {
      const double x = -std::log(u), y = -std::log(v);
      out = std::exp(-std::pow(std::pow(x, theta) + std::pow(y, theta), 1.0 / theta));
      break;
    }
    case CopulaFamily::Frank: {
      const double num = std::expm1(-theta * u) * std::expm1(-theta * v);
      out = -std::log1p(num / std::expm1(-theta)) / theta;
      break;
    }
  }
  return std::clamp(out, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double log_copula_density(CopulaFamily fam, double u, double v, double theta) {
  check_theta(fam, theta);
  check_unit(u, v, true);
  return log_density_unchecked(fam, u, v, theta);
}

double copula_density(CopulaFamily fam, double u, double v, double theta) {
  return std::exp(log_copula_density(fam, u, v, theta));
}

double joint_survival(double t1, double t2, std::span<const double> x, const MarginalFit& m1,
                      const MarginalFit& m2, const CopulaFit& cf) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("joint_survival requires t > 0");
  return link_eval(cf.family, marginal_survival(t1, x, m1), marginal_survival(t2, x, m2),
                   cf.theta);
}

ThetaBracket theta_bracket(CopulaFamily fam) {
  switch (fam) {
    case CopulaFamily::Clayton: return {1e-3, 50.0};
    case CopulaFamily::Gumbel: return {1.0 + 1e-6, 50.0};
    case CopulaFamily::Frank: return {-50.0, 50.0};
  }
  return {0.0, 0.0};
}

std::vector<PseudoObs> pseudo_observations(const Dataset& arm, const MarginalFit& m1,
                                           const MarginalFit& m2, const CensoringModel& G1,
                                           const CensoringModel& G2) {
  std::vector<PseudoObs> rows;
  rows.reserve(arm.size());
  for (const auto& o : arm) {
    PseudoObs r{};
    r.weight = (o.delta1 == 1 && o.delta2 == 1)
                   ? 1.0 / (eval_G(G1, o.y1, o.x) * eval_G(G2, o.y2, o.x))
                   : 0.0;
    r.u = std::clamp(marginal_survival(o.y1, o.x, m1), kProbClamp, 1.0 - kProbClamp);
    r.v = std::clamp(marginal_survival(o.y2, o.x, m2), kProbClamp, 1.0 - kProbClamp);
    r.log_marginals = std::log(std::max(marginal_density(o.y1, o.x, m1), 1e-300)) +
                      std::log(std::max(marginal_density(o.y2, o.x, m2), 1e-300));
    rows.push_back(r);
  }
  return rows;
}

double copula_objective(CopulaFamily fam, double theta, std::span<const PseudoObs> rows) {
  double s = 0.0;
  for (const auto& r : rows)
    if (r.weight > 0.0) s -= r.weight * log_density_unchecked(fam, r.u, r.v, theta);
  return s;
}

double copula_neg_loglik(CopulaFamily fam, double theta, std::span<const PseudoObs> rows) {
  double s = copula_objective(fam, theta, rows);
  for (const auto& r : rows)
    if (r.weight > 0.0) s -= r.weight * r.log_marginals;
  return s;
}

CopulaFit fit_theta_rows(std::span<const PseudoObs> rows, CopulaFamily fam, int arm) {
  if (std::none_of(rows.begin(), rows.end(), [](const PseudoObs& r) { return r.weight > 0.0; }))
    throw InsufficientDataError("copula fit for arm " + std::to_string(arm) +
                                ": no doubly-uncensored observations");

  const auto bracket = theta_bracket(fam);
  const double s_lo = to_search(fam, bracket.lo);
  const double s_hi = to_search(fam, bracket.hi);
  auto objective = [&](double s) {
    const double v = copula_objective(fam, to_theta(fam, s), rows);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  // Coarse scan to pick the basin, then golden section inside it.
  constexpr int kGrid = 40;
  int best_k = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double f = objective(s_lo + (s_hi - s_lo) * k / kGrid);
    if (f < best_f) {
      best_f = f;
      best_k = k;
    }
  }
  const double step = (s_hi - s_lo) / kGrid;
  const double lo = s_lo + step * std::max(best_k - 1, 0);
  const double hi = s_lo + step * std::min(best_k + 1, kGrid);

  CopulaFit fit;
  fit.family = fam;
  fit.arm = arm;
  auto g = golden_section(objective, lo, hi, 1e-6 * (s_hi - s_lo), fit.trace);
  auto [s_best, f_best] = brent_minimize(objective, g.lo, g.hi, g.best_x, g.best_f, 1e-10);
  if (!(f_best <= g.best_f)) {
    s_best = g.best_x;
    f_best = g.best_f;
  }

  double theta = to_theta(fam, s_best);
  if (fam == CopulaFamily::Frank && std::abs(theta) < kFrankZero)
    theta = theta < 0.0 ? -kFrankZero : kFrankZero;
  theta = std::clamp(theta, bracket.lo, bracket.hi);
  fit.theta = theta;
  const double edge_tol = 1e-3 * (s_hi - s_lo);
  fit.at_boundary = (s_best - s_lo) < edge_tol || (s_hi - s_best) < edge_tol;
  fit.neg_loglik = copula_neg_loglik(fam, theta, rows);
  return fit;
}

CopulaFit fit_theta(const Dataset& arm, const MarginalFit& m1, const MarginalFit& m2,
                    const CensoringModel& G1, const CensoringModel& G2, CopulaFamily fam) {
  const auto rows = pseudo_observations(arm, m1, m2, G1, G2);
  const int a = arm.empty() ? 0 : arm[0].a;
  return fit_theta_rows(rows, fam, a);
}

LinkSelection select_link_cv(const Dataset& arm, const MarginalFit& m1, const MarginalFit& m2,
                             const CensoringModel& G1, const CensoringModel& G2,
                             const std::vector<CopulaFamily>& candidates, int folds,
                             std::uint64_t seed) {
  if (candidates.empty()) throw std::invalid_argument("link selection needs a candidate");
  if (folds < 2) throw std::invalid_argument("link selection needs at least 2 folds");
  const int a = arm.empty() ? 0 : arm[0].a;
  LinkSelection sel;
  if (candidates.size() == 1) {
    sel.family = candidates.front();
    sel.cv_risk.assign(1, 0.0);
    return sel;
  }

  const auto rows = pseudo_observations(arm, m1, m2, G1, G2);
  std::vector<std::size_t> doubly, rest;
  for (std::size_t i = 0; i < rows.size(); ++i) (rows[i].weight > 0.0 ? doubly : rest).push_back(i);
  if (doubly.size() < static_cast<std::size_t>(folds))
    throw InsufficientDataError("link selection for arm " + std::to_string(a) + ": " +
                                std::to_string(doubly.size()) +
                                " doubly-uncensored rows cannot cover " + std::to_string(folds) +
                                " folds");

  Rng rng(seed);
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  };
  shuffle(doubly);
  shuffle(rest);
  std::vector<int> fold_of(rows.size());
  for (std::size_t k = 0; k < doubly.size(); ++k) fold_of[doubly[k]] = static_cast<int>(k % folds);
  for (std::size_t k = 0; k < rest.size(); ++k)
    fold_of[rest[k]] = static_cast<int>((doubly.size() + k) % folds);

  sel.cv_risk.assign(candidates.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<PseudoObs> train, test;
    for (std::size_t i = 0; i < rows.size(); ++i) (fold_of[i] == f ? test : train).push_back(rows[i]);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto fit = fit_theta_rows(train, candidates[c], a);
      sel.cv_risk[c] += copula_neg_loglik(candidates[c], fit.theta, test);
    }
  }
  for (auto& r : sel.cv_risk) r /= static_cast<double>(rows.size());
  const auto best = std::min_element(sel.cv_risk.begin(), sel.cv_risk.end()) - sel.cv_risk.begin();
  sel.family = candidates[best];
  return sel;
}

}  // namespace bitr
