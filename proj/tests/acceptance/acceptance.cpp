// Acceptance criteria: one PASS/FAIL line per criterion with measured values.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../unit/helpers.hpp"
#include "bitr/censoring.hpp"
#include "bitr/copula.hpp"
#include "bitr/forest.hpp"
#include "bitr/itr.hpp"
#include "bitr/marginal.hpp"
#include "bitr/policy.hpp"
#include "bitr/simulation.hpp"

using namespace bitr;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::string what;
  bool ok;
};

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}
  void check(bool ok, const std::string& what) { checks_.push_back({what, ok}); }
  bool passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.ok; });
  }
  void print(double seconds) const {
    std::printf("%s criterion %d: %s (%.1fs)\n", passed() ? "PASS" : "FAIL", id_, title_.c_str(),
                seconds);
    for (const auto& c : checks_) std::printf("    [%s] %s\n", c.ok ? "ok" : "x", c.what.c_str());
    std::fflush(stdout);
  }

 private:
  int id_;
  std::string title_;
  std::vector<Check> checks_;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const std::vector<WeightConfig> kConfigs{{0.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}};

int workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

ReplicationReport full_run(Scenario tag) {
  ReplicationOptions opts;
  opts.R = 100;
  opts.n_test = 1000;
  opts.jobs = workers();
  return run_replications(make_scenario(tag, 200), kConfigs, opts);
}

const ConfigSummary& config(const ReplicationReport& r, WeightConfig c) {
  for (const auto& cs : r.configs)
    if (cs.c.c1 == c.c1 && cs.c.c2 == c.c2) return cs;
  throw std::logic_error("missing weight configuration");
}

void otia_checks(Criterion& cr, const ReplicationReport& rep, const std::string& name,
                 const double (&target)[3], double tol) {
  for (int k = 0; k < 3; ++k) {
    const auto& cs = config(rep, kConfigs[k]);
    const double diff = cs.mean_otia - target[k];
    cr.check(std::abs(diff) <= tol, name + " c=" + kConfigs[k].label() + ": OTIA " +
                                        fmt("%.4f", cs.mean_otia) + " vs " + fmt("%.4f", target[k]) +
                                        " (diff " + fmt("%+.4f", diff) + ", tol " +
                                        fmt("%.2f", tol) + ", failures " +
                                        std::to_string(cs.failures) + ")");
  }
}

// ---------------------------------------------------------------------------
// Coefficient table for Case 2, [c][arm][outcome-1][component]: {bias, ssd}.
// c order: (1,1), (0,0), (-1,1).
struct Cell {
  double bias, ssd;
};
const Cell kTable[3][3][2][2] = {
    {{{{0.0845, 0.2530}, {0.1062, 0.1890}}, {{0.1253, 0.1848}, {0.1048, 0.2755}}},
     {{{0.0353, 0.2773}, {0.1450, 0.2036}}, {{0.1655, 0.2168}, {0.0933, 0.2629}}},
     {{{0.0017, 0.1835}, {0.0247, 0.1592}}, {{0.0468, 0.1864}, {0.0691, 0.2774}}}},
    {{{{0.0190, 0.2396}, {0.0010, 0.1605}}, {{0.0044, 0.1677}, {0.0035, 0.2305}}},
     {{{0.0204, 0.2291}, {0.0426, 0.1793}}, {{0.0218, 0.1991}, {0.0051, 0.2323}}},
     {{{0.0212, 0.2053}, {0.0369, 0.1721}}, {{0.0058, 0.1889}, {0.0143, 0.2382}}}},
    {{{{0.0548, 0.3223}, {0.0996, 0.2173}}, {{0.1000, 0.2524}, {0.0871, 0.2952}}},
     {{{0.0377, 0.3026}, {0.1294, 0.2361}}, {{0.1471, 0.2407}, {0.0569, 0.2769}}},
     {{{0.0081, 0.2240}, {0.0467, 0.1938}}, {{0.0290, 0.2192}, {0.0285, 0.3281}}}},
};
const WeightConfig kTableConfigs[3] = {{1.0, 1.0}, {0.0, 0.0}, {-1.0, 1.0}};

void coefficient_table(Criterion& cr, const ReplicationReport& rep) {
  for (int t = 0; t < 3; ++t) {
    const auto& cs = config(rep, kTableConfigs[t]);
    const bool baseline = t == 1;
    int bad = 0;
    double worst_bias = 0.0, worst_ssd = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int j = 1; j <= 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const auto idx = coef_index(a, j, k);
          const Cell& ref = kTable[t][a][j - 1][k];
          const double db = baseline ? cs.bias[idx] : std::abs(cs.bias[idx] - ref.bias);
          const double ds = std::abs(cs.ssd[idx] - ref.ssd);
          worst_bias = std::max(worst_bias, db);
          worst_ssd = std::max(worst_ssd, ds);
          bad += db > 0.06 || ds > 0.06;
        }
    cr.check(bad == 0, "c=" + kTableConfigs[t].label() + ": " + std::to_string(bad) +
                           " of 12 rows outside 0.06; worst " +
                           (baseline ? std::string("|bias| ") : std::string("bias gap ")) +
                           fmt("%.4f", worst_bias) + ", worst SSD gap " + fmt("%.4f", worst_ssd));
  }
  std::ostringstream rows;
  rows << "measured (bias, SSD) per row [arm outcome comp]:";
  int smallest = 0;
  for (int a = 0; a < 3; ++a)
    for (int j = 1; j <= 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const auto idx = coef_index(a, j, k);
        const double base = config(rep, kTableConfigs[1]).ssd[idx];
        smallest += base <= config(rep, kTableConfigs[0]).ssd[idx] &&
                    base <= config(rep, kTableConfigs[2]).ssd[idx];
        rows << "\n        [" << a << ' ' << j << ' ' << k + 1 << ']';
        for (int t = 0; t < 3; ++t) {
          const auto& cs = config(rep, kTableConfigs[t]);
          rows << "  c=" << kTableConfigs[t].label() << ' ' << fmt("(%.4f, %.4f)", cs.bias[idx], cs.ssd[idx]);
        }
      }
  cr.check(smallest >= 8, "baseline smallest SSD in " + std::to_string(smallest) +
                              " of 12 rows (need >= 8)");
  cr.check(true, rows.str());
}

// ---------------------------------------------------------------------------
CensoringModel no_censoring() {
  return fit_km_censoring(Dataset({testing::obs(1, 1, 1, 1, 0, {0.0, 0.0})}, 2), 1);
}

void estimator_suite(Criterion& cr) {
  // (a) c = (0,0) reduces to least squares on uncensored data.
  {
    Rng rng(101);
    std::vector<Observation> rows;
    for (int i = 0; i < 600; ++i) {
      const int a = static_cast<int>(rng.below(3));
      const std::vector<double> x{rng.uniform(-2.8, 2.8), rng.uniform(-2.8, 2.8)};
      rows.push_back(testing::obs(std::exp(0.5 * a * x[0] - x[1] + rng.normal()),
                                  std::exp(x[0] + 0.3 * a * x[1] + rng.normal()), 1, 1, a, x));
    }
    const Dataset d(std::move(rows), 2);
    const auto G = no_censoring();
    double worst = 0.0;
    for (int a = 0; a <= 2; ++a)
      for (int j = 1; j <= 2; ++j) {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (const auto& o : d)
          if (o.a == a) {
            xs.push_back(o.x);
            ys.push_back(std::log(o.y(j)));
          }
        const auto ols = testing::wls(xs, ys, std::vector<double>(xs.size(), 1.0));
        const auto fit = solve_app_beta(d, j, a, LinearPredictor({0.0, 0.0}), G,
                                        estimate_kappa(d, a).kappa, {0.0, 0.0});
        for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(fit.beta[k] - ols(k)));
      }
    cr.check(worst <= 1e-10, "c=(0,0) vs least squares, max |diff| " + fmt("%.2e", worst) +
                                 " (tol 1e-10)");
  }
  // (b) prediction terms vanish at f(x) = xᵀβ.
  {
    const Dataset d = generate_dataset(make_scenario(Scenario::Case2, 500), 102);
    const std::vector<double> beta{0.4, -0.9};
    const LinearPredictor f(beta);
    const Dataset arm = split_by_arm(d, 2);
    const auto G = fit_km_censoring(arm, 1);
    const double kappa = estimate_kappa(d, 2).kappa;
    long nonzero = 0;
    for (const auto& o : d) {
      const auto base = app_score(beta, f, G, kappa, o, 1, 2, {0.0, 0.0});
      for (const WeightConfig c : {WeightConfig(1, 1), WeightConfig(-1, 1), WeightConfig(1, -1)}) {
        const auto s = app_score(beta, f, G, kappa, o, 1, 2, c);
        for (std::size_t k = 0; k < s.size(); ++k) nonzero += s[k] - base[k] != 0.0;
      }
    }
    cr.check(nonzero == 0, "prediction terms at f = working index: " + std::to_string(nonzero) +
                               " nonzero entries (need exactly 0)");
  }
  // (c) +10 corruption of the auxiliary predictor, Case 2, n = 5000.
  {
    const Dataset d = generate_dataset(make_scenario(Scenario::Case2, 5000), 103);
    double worst_debiased = 0.0, least_plain = 1e300;
    for (int a = 0; a <= 2; ++a) {
      const Dataset arm = split_by_arm(d, a);
      const double kappa = estimate_kappa(d, a).kappa;
      for (int j = 1; j <= 2; ++j) {
        const auto G = fit_km_censoring(arm, j);
        ForestParams fp;
        fp.seed = 200 + 10 * a + j;
        const auto f = fit_ipcw_forest(arm, j, G, fp);
        const ShiftedPredictor bad(f, 10.0);
        auto shift = [&](const WeightConfig& c) {
          const auto b0 = solve_app_beta(d, j, a, f, G, kappa, c);
          const auto b1 = solve_app_beta(d, j, a, bad, G, kappa, c);
          return std::hypot(b1.beta[0] - b0.beta[0], b1.beta[1] - b0.beta[1]);
        };
        worst_debiased = std::max(worst_debiased, shift({1.0, -1.0}));
        least_plain = std::min(least_plain, shift({1.0, 1.0}));
      }
    }
    cr.check(worst_debiased < 0.05, "c=(1,-1) shift under +10 corruption, max over arms/outcomes " +
                                        fmt("%.4f", worst_debiased) + " (need < 0.05)");
    cr.check(least_plain > 1.0, "c=(1,1) shift under +10 corruption, min over arms/outcomes " +
                                    fmt("%.4f", least_plain) + " (need > 1.0)");
  }
  // (d) averaged score at the solver output.
  {
    const Dataset d = generate_dataset(make_scenario(Scenario::Main, 200), 104);
    double worst = 0.0;
    for (int a = 0; a <= 2; ++a) {
      const Dataset arm = split_by_arm(d, a);
      const double kappa = estimate_kappa(d, a).kappa;
      for (int j = 1; j <= 2; ++j) {
        const auto G = fit_km_censoring(arm, j);
        ForestParams fp;
        fp.seed = 300 + a * 10 + j;
        const auto f = fit_ipcw_forest(arm, j, G, fp);
        for (const auto& c : kConfigs) {
          const auto fit = solve_app_beta(d, j, a, f, G, kappa, c);
          for (double v : mean_app_score(fit.beta, f, G, kappa, d, j, a, c))
            worst = std::max(worst, std::abs(v));
        }
      }
    }
    cr.check(worst <= 1e-8, "averaged score at the solution, max |component| " +
                                fmt("%.2e", worst) + " (tol 1e-8)");
  }
}

// ---------------------------------------------------------------------------
Dataset clayton_arm(double theta, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Observation> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> x{rng.uniform(-2.8, 2.8), rng.uniform(-2.8, 2.8)};
    const auto [u, v] = clayton_sample(theta, rng);
    const double l1 = 1.5 * x[0] + x[1] - normal_quantile(u);
    const double l2 = x[0] + 1.5 * x[1] - normal_quantile(v);
    rows.push_back(testing::obs(std::exp(l1), std::exp(l2), 1, 1, 0, x));
  }
  return Dataset(std::move(rows), 2);
}

void copula_suite(Criterion& cr) {
  double worst_density = 0.0;
  const double grid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const double h = 1e-5;
  for (auto fam : kAllFamilies)
    for (double theta : {1.5, 2.0, 3.0})
      for (double u : grid)
        for (double v : grid) {
          const double fd = (link_eval(fam, u + h, v + h, theta) - link_eval(fam, u + h, v - h, theta) -
                             link_eval(fam, u - h, v + h, theta) + link_eval(fam, u - h, v - h, theta)) /
                            (4 * h * h);
          const double exact = copula_density(fam, u, v, theta);
          worst_density = std::max(worst_density, std::abs(fd - exact) / std::abs(exact));
        }
  cr.check(worst_density <= 1e-4, "density vs numerical mixed partial, max relative error " +
                                      fmt("%.2e", worst_density) + " (tol 1e-4)");

  double frechet = 0.0, margin = 0.0;
  for (auto fam : kAllFamilies)
    for (double theta : {1.01, 2.0, 5.0, 20.0}) {
      for (double u = 0.05; u < 1.0; u += 0.1)
        for (double v = 0.05; v < 1.0; v += 0.1) {
          const double c = link_eval(fam, u, v, theta);
          frechet = std::max({frechet, std::max(u + v - 1.0, 0.0) - c, c - std::min(u, v)});
        }
      for (double u = 0.05; u < 1.0; u += 0.1) {
        margin = std::max(margin, std::abs(link_eval(fam, u, 1.0 - 1e-12, theta) - u));
        margin = std::max(margin, std::abs(link_eval(fam, 1.0 - 1e-12, u, theta) - u));
      }
    }
  cr.check(frechet <= 1e-15, "Frechet bounds, max violation " + fmt("%.2e", std::max(frechet, 0.0)));
  cr.check(margin <= 1e-9, "margin recovery, max error " + fmt("%.2e", margin));

  MarginalFit m1, m2;
  m1.beta = {1.5, 1.0};
  m2.beta = {1.0, 1.5};
  m2.outcome = 2;
  const auto G = no_censoring();
  for (double theta : {2.0, 3.0}) {
    const auto fit = fit_theta(clayton_arm(theta, 2000, 400 + static_cast<int>(theta)), m1, m2, G, G,
                               CopulaFamily::Clayton);
    cr.check(std::abs(fit.theta - theta) <= 0.25,
             "theta recovery at n = 2000: " + fmt("%.4f vs %.1f", fit.theta, theta) + " (tol 0.25)");
  }
  int clayton = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const auto sel = select_link_cv(clayton_arm(3.0, 500, 500 + r), m1, m2, G, G, kAllFamilies, 5,
                                    static_cast<std::uint64_t>(r));
    clayton += sel.family == CopulaFamily::Clayton;
  }
  cr.check(clayton >= 0.7 * reps, "link selection picks Clayton in " + std::to_string(clayton) +
                                      " of " + std::to_string(reps) + " (need >= 70%)");
}

// ---------------------------------------------------------------------------
void policy_suite(Criterion& cr) {
  Rng rng(600);
  double worst_grad = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    auto net = init_network(2, 2, 4, 700 + draw);
    for (auto& b : net.biases)
      for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = rng.uniform(-0.5, 0.5);
    std::vector<PolicySample> batch;
    for (int i = 0; i < 16; ++i)
      batch.push_back({{rng.uniform(-2, 2), rng.uniform(-2, 2)}, {rng.uniform(), rng.uniform(), rng.uniform()}});
    Gradient g;
    value_loss_and_gradient(net, batch, g);
    const auto analytic = g.flat();
    auto theta = net.flat_params();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double keep = theta[k], step = 1e-5;
      theta[k] = keep + step;
      net.set_flat_params(theta);
      const double up = empirical_value_loss(net, batch);
      theta[k] = keep - step;
      net.set_flat_params(theta);
      const double down = empirical_value_loss(net, batch);
      theta[k] = keep;
      net.set_flat_params(theta);
      const double fd = (up - down) / (2 * step);
      worst_grad = std::max(worst_grad, std::abs(fd - analytic[k]) /
                                            std::max({std::abs(fd), std::abs(analytic[k]), 1e-6}));
    }
  }
  cr.check(worst_grad <= 1e-4, "analytic vs finite-difference gradient, max relative error " +
                                   fmt("%.2e", worst_grad) + " (tol 1e-4)");

  double worst_norm = 0.0;
  int shift_mismatch = 0;
  auto net = init_network(2, 2, 32, 800);
  auto shifted = net;
  shifted.biases.back().array() += 57.0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    double s = 0.0;
    for (double v : policy(net, x)) s += v;
    worst_norm = std::max(worst_norm, std::abs(s - 1.0));
    shift_mismatch += decide(net, x) != decide(shifted, x);
  }
  cr.check(worst_norm <= 1e-12, "softmax normalization, max |sum - 1| " + fmt("%.2e", worst_norm));
  cr.check(shift_mismatch == 0, "decision changes under a common logit shift: " +
                                    std::to_string(shift_mismatch) + " of 1000");

  std::vector<PolicySample> toy;
  for (int i = 0; i < 200; ++i) {
    const double x1 = rng.uniform(-2, 2), x2 = rng.uniform(-2, 2);
    toy.push_back({{x1, x2}, x1 < 0 ? std::vector<double>{1, 0, 0} : std::vector<double>{0, 1, 0}});
  }
  TrainConfig tc;
  tc.seed = 801;
  const auto toy_fit = train(init_network(2, 2, 32, 802), toy, tc);
  int hit = 0;
  for (const auto& s : toy) hit += decide(toy_fit.net, s.x) == (s.x[0] < 0 ? 0 : 1);
  cr.check(hit >= 190, "separable toy accuracy " + fmt("%.3f", hit / 200.0) + " (need >= 0.95)");

  const auto spec = make_scenario(Scenario::Main, 2000);
  std::vector<PolicySample> data;
  for (const auto& x : generate_covariates(spec, 2000, 803)) data.push_back({x, true_survival_vector(spec, x)});
  tc.seed = 804;
  const auto fit = train(init_network(2, 2, 32, 805), data, tc);
  double vp = 0.0, vo = 0.0;
  const auto test_x = generate_covariates(spec, 10000, 806);
  for (const auto& x : test_x) {
    const auto s = true_survival_vector(spec, x);
    const auto d = policy(fit.net, x);
    for (int a = 0; a < 3; ++a) vp += s[a] * d[a] / test_x.size();
    vo += s[oracle_policy(spec, x)] / test_x.size();
  }
  cr.check(vo - vp <= 0.02, "value gap on true survival, n = 2000: oracle " +
                                fmt("%.4f, policy %.4f", vo, vp) + " (gap tol 0.02)");
}

// ---------------------------------------------------------------------------
int cli(const std::string& args) {
  const std::string cmd = std::string(BITR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism(Criterion& cr) {
  ReplicationOptions opts;
  opts.R = 6;
  opts.n_test = 300;
  opts.itr.forest.n_trees = 30;
  opts.itr.train.epochs = 50;
  const auto spec = make_scenario(Scenario::Main, 120);
  opts.jobs = 1;
  const auto a = report_csv(run_replications(spec, kConfigs, opts));
  const auto b = report_csv(run_replications(spec, kConfigs, opts));
  opts.jobs = 4;
  const auto c = report_csv(run_replications(spec, kConfigs, opts));
  cr.check(a == b, "library report, two serial runs identical");
  cr.check(a == c, "library report, 1 vs 4 workers identical");

  const auto dir = testing::temp_dir("acceptance_det");
  const std::string sim = "simulate --set R=4 --set n=120 --set n_trees=30 --set epochs=50";
  bool ran = cli(sim + " --out " + (dir / "s1").string()) == 0 &&
             cli(sim + " --out " + (dir / "s2").string()) == 0 &&
             cli(sim + " --jobs 3 --out " + (dir / "s3").string()) == 0;
  bool same = ran;
  for (const char* f : {"report.csv", "summary.txt"}) {
    const auto r1 = testing::slurp(dir / "s1" / f);
    same = same && !r1.empty() && r1 == testing::slurp(dir / "s2" / f) &&
           r1 == testing::slurp(dir / "s3" / f);
  }
  cr.check(same, "CLI simulate: report.csv and summary.txt byte identical across two runs and --jobs 3");

  const auto data = dir / "d.csv";
  ran = cli("generate --set n=150 --out " + data.string()) == 0 &&
        cli("fit --set n_trees=30 --set epochs=50 --data " + data.string() + " --out " +
            (dir / "m1.json").string()) == 0 &&
        cli("fit --set n_trees=30 --set epochs=50 --jobs 2 --data " + data.string() + " --out " +
            (dir / "m2.json").string()) == 0;
  cr.check(ran && testing::slurp(dir / "m1.json") == testing::slurp(dir / "m2.json"),
           "CLI fit: model files byte identical across two runs");
}

}  // namespace

int main() {
  std::printf("acceptance: %d worker thread(s)\n", workers());
  bool all = true;
  auto run = [&](Criterion& cr, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(cr);
    } catch (const std::exception& e) {
      cr.check(false, std::string("exception: ") + e.what());
    }
    cr.print(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    all = all && cr.passed();
  };

  ReplicationReport case2;
  Criterion c1(1, "main-scenario OTIA, n = 200, R = 100, n_test = 1000");
  run(c1, [](Criterion& cr) {
    const auto rep = full_run(Scenario::Main);
    const double target[3] = {0.9254, 0.9578, 0.9382};
    otia_checks(cr, rep, "main", target, 0.03);
    const double base = config(rep, kConfigs[0]).mean_otia;
    const double pb = config(rep, kConfigs[1]).mean_otia;
    const double pp = config(rep, kConfigs[2]).mean_otia;
    cr.check(pb >= pp && pp >= base, "ordering PB >= PP >= Baseline: " +
                                         fmt("%.4f >= %.4f", pb, pp) + fmt(" >= %.4f", base));
  });

  Criterion c2(2, "Case 1 and Case 2 OTIA");
  run(c2, [&case2](Criterion& cr) {
    const double t1[3] = {0.9839, 0.9831, 0.9822};
    otia_checks(cr, full_run(Scenario::Case1), "case1", t1, 0.02);
    case2 = full_run(Scenario::Case2);
    const double t2[3] = {0.9750, 0.9736, 0.9716};
    otia_checks(cr, case2, "case2", t2, 0.02);
  });

  Criterion c3(3, "Case 2 coefficient bias and SSD table");
  run(c3, [&case2](Criterion& cr) {
    if (case2.configs.empty()) throw std::runtime_error("Case 2 run unavailable");
    coefficient_table(cr, case2);
  });

  Criterion c4(4, "estimator property suite");
  run(c4, estimator_suite);
  Criterion c5(5, "copula suite");
  run(c5, copula_suite);
  Criterion c6(6, "policy suite");
  run(c6, policy_suite);
  Criterion c7(7, "determinism");
  run(c7, determinism);

  std::printf("acceptance: %s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
