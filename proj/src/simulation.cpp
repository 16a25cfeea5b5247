#include "bitr/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "bitr/copula.hpp"
#include "bitr/policy.hpp"

namespace bitr {

namespace {

struct Pilot {
  std::vector<double> log_t;
  std::vector<double> u;  // uniform draws that become C = τ(3u − 1)
};

// Latent log times of one outcome plus censoring uniforms, reused across
// every τ probed by the bisection.
Pilot make_pilot(const ScenarioSpec& spec, int outcome, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Pilot pl;
  pl.log_t.reserve(n);
  pl.u.reserve(n);
  std::vector<double> x(spec.p);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = rng.uniform(spec.x_lo, spec.x_hi);
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.K + 1)));
    double u1, u2;
    if (spec.independent_errors) {
      u1 = rng.uniform();
      u2 = rng.uniform();
    } else {
      std::tie(u1, u2) = clayton_sample(spec.theta[a], rng);
    }
    const double z = -normal_quantile(outcome == 1 ? u1 : u2);
    pl.log_t.push_back(log_time_mean(spec, x, outcome, a) + log_time_scale(spec, x, outcome) * z);
    pl.u.push_back(rng.uniform());
  }
  return pl;
}

double pilot_rate(const Pilot& pl, double tau) {
  std::size_t censored = 0;
  for (std::size_t i = 0; i < pl.log_t.size(); ++i)
    censored += pl.log_t[i] > tau * (3.0 * pl.u[i] - 1.0);
  return static_cast<double>(censored) / static_cast<double>(pl.log_t.size());
}

double calibrate_one(const ScenarioSpec& spec, int outcome, const CalibrationOptions& opts) {
  const Pilot pl = make_pilot(spec, outcome, opts.pilot, mix_seed(spec.seed, 900 + outcome));
  double lo = opts.lo, hi = opts.hi;
  const double r_lo = pilot_rate(pl, lo);
  const double r_hi = pilot_rate(pl, hi);
  // The rate decreases in τ, so the target must be bracketed by the edges.
  if (!(r_lo > opts.target && r_hi < opts.target))
    throw CalibrationError("censoring calibration for " + to_string(spec.tag) + ", outcome " +
                           std::to_string(outcome) + ": target rate " +
                           format_double(opts.target) + " is not bracketed by [" +
                           format_double(r_hi) + ", " + format_double(r_lo) + "] for tau in [" +
                           format_double(opts.lo) + ", " + format_double(opts.hi) + "]");
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double r = pilot_rate(pl, mid);
    if (r > opts.target)
      lo = mid;
    else
      hi = mid;
    if (hi / lo < 1.0 + 1e-10) break;
  }
  const double tau = std::sqrt(lo * hi);
  const double achieved = pilot_rate(pl, tau);
  if (std::abs(achieved - opts.target) > opts.tolerance)
    throw CalibrationError("censoring calibration for outcome " + std::to_string(outcome) +
                           " reached rate " + format_double(achieved));
  return tau;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Main: return "main";
    case Scenario::Case1: return "case1";
    case Scenario::Case2: return "case2";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "main" || s == "Main") return Scenario::Main;
  if (s == "case1" || s == "Case1") return Scenario::Case1;
  if (s == "case2" || s == "Case2") return Scenario::Case2;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected main, case1 or case2)");
}

ScenarioSpec make_scenario(Scenario tag, int n) {
  ScenarioSpec s;
  s.tag = tag;
  s.n = n;
  return s;
}

double log_time_mean(const ScenarioSpec& spec, std::span<const double> x, int outcome, int arm) {
  const auto& b = spec.beta[outcome - 1][arm];
  double m = b[0] * x[0] + b[1] * x[1];
  if (spec.tag == Scenario::Main) m += x[1] * x[1];
  return m;
}

double log_time_scale(const ScenarioSpec& spec, std::span<const double> x, int outcome) {
  if (spec.tag == Scenario::Case1) return std::abs(x[outcome - 1]);
  return 1.0;
}

double true_marginal_survival(const ScenarioSpec& spec, double t, std::span<const double> x,
                              int outcome, int arm) {
  const double m = log_time_mean(spec, x, outcome, arm);
  const double s = log_time_scale(spec, x, outcome);
  const double lt = std::log(t);
  if (s < kMinErrorScale) return lt < m ? 1.0 : 0.0;
  return normal_sf((lt - m) / s);
}

double true_joint_survival(const ScenarioSpec& spec, double t1, double t2,
                           std::span<const double> x, int arm) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("times must be positive");
  const double u = true_marginal_survival(spec, t1, x, 1, arm);
  const double v = true_marginal_survival(spec, t2, x, 2, arm);
  if (spec.independent_errors) return u * v;
  return link_eval(CopulaFamily::Clayton, u, v, spec.theta[arm]);
}

std::vector<double> true_survival_vector(const ScenarioSpec& spec, std::span<const double> x) {
  std::vector<double> s(spec.K + 1);
  for (int a = 0; a <= spec.K; ++a) s[a] = true_joint_survival(spec, spec.t1, spec.t2, x, a);
  return s;
}

int oracle_policy(const ScenarioSpec& spec, std::span<const double> x) {
  const auto s = true_survival_vector(spec, x);
  return argmax_first(s);
}

std::pair<double, double> clayton_sample(double theta, Rng& rng) {
  const double u = rng.uniform();
  const double w = rng.uniform();
  // V = (U^{-θ}(W^{-θ/(1+θ)} − 1) + 1)^{-1/θ}
  const double a = std::expm1(-theta / (1.0 + theta) * std::log(w));
  const double v = std::exp(-std::log1p(std::exp(-theta * std::log(u)) * a) / theta);
  return {u, std::clamp(v, 1e-300, 1.0 - 1e-16)};
}

double censoring_rate(const ScenarioSpec& spec, int outcome, double tau, std::size_t pilot,
                      std::uint64_t seed) {
  return pilot_rate(make_pilot(spec, outcome, pilot, seed), tau);
}

TauPair calibrate_tau(const ScenarioSpec& spec, const CalibrationOptions& opts) {
  return {calibrate_one(spec, 1, opts), calibrate_one(spec, 2, opts)};
}

TauPair resolve_tau(const ScenarioSpec& spec) {
  if (spec.tau1 && spec.tau2) return {*spec.tau1, *spec.tau2};
  TauPair tau;
  if (spec.tag == Scenario::Main) {
    tau = calibrate_tau(spec);
  } else {
    ScenarioSpec main = spec;
    main.tag = Scenario::Main;
    tau = calibrate_tau(main);
  }
  if (spec.tau1) tau.tau1 = *spec.tau1;
  if (spec.tau2) tau.tau2 = *spec.tau2;
  return tau;
}

Dataset generate_dataset(const ScenarioSpec& spec, std::uint64_t seed) {
  const TauPair tau = resolve_tau(spec);
  Rng rng(seed);
  std::vector<Observation> rows;
  rows.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    Observation o;
    o.x.resize(spec.p);
    for (auto& v : o.x) v = rng.uniform(spec.x_lo, spec.x_hi);
    o.a = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.K + 1)));
    double u1, u2;
    if (spec.independent_errors) {
      u1 = rng.uniform();
      u2 = rng.uniform();
    } else {
      std::tie(u1, u2) = clayton_sample(spec.theta[o.a], rng);
    }
    // survival-copula orientation: large U means early failure
    const double lt1 = log_time_mean(spec, o.x, 1, o.a) -
                       log_time_scale(spec, o.x, 1) * normal_quantile(u1);
    const double lt2 = log_time_mean(spec, o.x, 2, o.a) -
                       log_time_scale(spec, o.x, 2) * normal_quantile(u2);
    const double c1 = rng.uniform(-tau.tau1, 2.0 * tau.tau1);
    const double c2 = rng.uniform(-tau.tau2, 2.0 * tau.tau2);
    o.y1 = std::exp(std::min(lt1, c1));
    o.y2 = std::exp(std::min(lt2, c2));
    o.delta1 = lt1 <= c1;
    o.delta2 = lt2 <= c2;
    rows.push_back(std::move(o));
  }
  return Dataset(std::move(rows), spec.p, spec.K);
}

std::vector<std::vector<double>> generate_covariates(const ScenarioSpec& spec, std::size_t n,
                                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> xs(n, std::vector<double>(spec.p));
  for (auto& x : xs)
    for (auto& v : x) v = rng.uniform(spec.x_lo, spec.x_hi);
  return xs;
}

double compute_otia(std::span<const int> decisions, std::span<const int> oracle) {
  if (decisions.size() != oracle.size())
    throw std::invalid_argument("decision and oracle lists differ in length");
  if (decisions.empty()) throw std::invalid_argument("empty decision list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) hits += decisions[i] == oracle[i];
  return static_cast<double>(hits) / static_cast<double>(decisions.size());
}

ReplicationReport run_replications(const ScenarioSpec& spec_in,
                                   const std::vector<WeightConfig>& configs,
                                   const ReplicationOptions& opts) {
  if (opts.R < 1) throw std::invalid_argument("need at least one replication");
  if (configs.empty()) throw std::invalid_argument("need at least one weight configuration");
  if (opts.n_test < 1) throw std::invalid_argument("test set must be nonempty");

  ReplicationReport report;
  report.spec = spec_in;
  report.tau = resolve_tau(spec_in);
  report.spec.tau1 = report.tau.tau1;
  report.spec.tau2 = report.tau.tau2;
  report.R = opts.R;
  report.n_test = opts.n_test;
  const ScenarioSpec& spec = report.spec;
  const std::size_t n_coef = static_cast<std::size_t>(spec.K + 1) * 2 * spec.p;

  // records[c][r]
  std::vector<std::vector<ReplicationRecord>> records(
      configs.size(), std::vector<ReplicationRecord>(opts.R));

  auto run_one = [&](int r) {
    const std::uint64_t rep_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(r));
    for (auto& rc : records) {
      rc[r].replication = r;
      rc[r].seed = rep_seed;
    }
    try {
      const Dataset train = generate_dataset(spec, mix_seed(rep_seed, 1));
      const auto test_x = generate_covariates(spec, opts.n_test, mix_seed(rep_seed, 2));
      std::vector<int> oracle(test_x.size());
      for (std::size_t i = 0; i < test_x.size(); ++i) oracle[i] = oracle_policy(spec, test_x[i]);

      ItrOptions itr = opts.itr;
      itr.seed = mix_seed(rep_seed, 3);
      itr.t1 = spec.t1;
      itr.t2 = spec.t2;
      const Nuisance nu = fit_nuisance(train, itr);
      for (std::size_t c = 0; c < configs.size(); ++c) {
        auto& rec = records[c][r];
        const auto tc = std::chrono::steady_clock::now();
        try {
          auto fitted = fit_policy(fit_joint_model(train, nu, configs[c], itr), train, itr);
          std::vector<int> dec(test_x.size());
          for (std::size_t i = 0; i < test_x.size(); ++i) dec[i] = decide(fitted.net, test_x[i]);
          rec.otia = compute_otia(dec, oracle);
          rec.beta_hat.assign(n_coef, 0.0);
          for (int a = 0; a <= spec.K; ++a)
            for (int j = 1; j <= 2; ++j)
              for (int k = 0; k < spec.p; ++k) {
                const auto& m = j == 1 ? fitted.model.arms[a].m1 : fitted.model.arms[a].m2;
                rec.beta_hat[coef_index(a, j, k, spec.p)] = m.beta[k];
              }
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.error = e.what();
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - tc).count();
      }
    } catch (const std::exception& e) {
      for (auto& rc : records) {
        rc[r].failed = true;
        rc[r].error = e.what();
      }
    }
  };

  const int jobs = std::clamp(opts.jobs, 1, opts.R);
  if (jobs == 1) {
    for (int r = 0; r < opts.R; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int r = next++; r < opts.R; r = next++) run_one(r);
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t c = 0; c < configs.size(); ++c) {
    ConfigSummary cs;
    cs.c = configs[c];
    cs.records = std::move(records[c]);
    std::vector<double> otia;
    std::vector<const ReplicationRecord*> ok;
    for (const auto& rec : cs.records) {
      if (rec.failed) {
        ++cs.failures;
      } else {
        otia.push_back(rec.otia);
        ok.push_back(&rec);
      }
    }
    if (cs.failures > opts.max_failure_fraction * opts.R) {
      std::string first;
      for (const auto& rec : cs.records)
        if (rec.failed) {
          first = rec.error;
          break;
        }
      throw ReplicationFailure(std::to_string(cs.failures) + " of " + std::to_string(opts.R) +
                               " replications failed for c = " + cs.c.label() +
                               " (first error: " + first + ")");
    }
    cs.mean_otia = otia.empty() ? 0.0 : mean(otia);
    cs.bias.assign(n_coef, 0.0);
    cs.ssd.assign(n_coef, 0.0);
    for (int a = 0; a <= spec.K; ++a)
      for (int j = 1; j <= 2; ++j)
        for (int k = 0; k < spec.p; ++k) {
          const std::size_t idx = coef_index(a, j, k, spec.p);
          std::vector<double> est;
          for (const auto* rec : ok) est.push_back(rec->beta_hat[idx]);
          if (est.empty()) continue;
          const double m = mean(est);
          cs.bias[idx] = std::abs(m - spec.beta[j - 1][a][k]);
          if (est.size() > 1) {
            double ss = 0.0;
            for (double e : est) ss += (e - m) * (e - m);
            cs.ssd[idx] = std::sqrt(ss / static_cast<double>(est.size() - 1));
          }
        }
    report.configs.push_back(std::move(cs));
  }
  return report;
}

std::string report_csv(const ReplicationReport& report) {
  const auto& spec = report.spec;
  std::ostringstream os;
  os << "row_type,scenario,c1,c2,replication,seed,arm,outcome,component,estimate,truth,value\n";
  const std::string sc = to_string(spec.tag);
  for (const auto& cs : report.configs) {
    const std::string cc = format_double(cs.c.c1) + "," + format_double(cs.c.c2);
    for (const auto& rec : cs.records) {
      if (rec.failed) {
        os << "failure," << sc << ',' << cc << ',' << rec.replication << ',' << rec.seed
           << ",,,,,,\n";
        continue;
      }
      os << "otia," << sc << ',' << cc << ',' << rec.replication << ',' << rec.seed << ",,,,,,"
         << format_double(rec.otia) << '\n';
      for (int a = 0; a <= spec.K; ++a)
        for (int j = 1; j <= 2; ++j)
          for (int k = 0; k < spec.p; ++k)
            os << "coef," << sc << ',' << cc << ',' << rec.replication << ',' << rec.seed << ','
               << a << ',' << j << ',' << k + 1 << ','
               << format_double(rec.beta_hat[coef_index(a, j, k, spec.p)]) << ','
               << format_double(spec.beta[j - 1][a][k]) << ",\n";
    }
    os << "summary_otia," << sc << ',' << cc << ",,,,,,,," << format_double(cs.mean_otia) << '\n';
    os << "summary_failures," << sc << ',' << cc << ",,,,,,,," << cs.failures << '\n';
    for (int a = 0; a <= spec.K; ++a)
      for (int j = 1; j <= 2; ++j)
        for (int k = 0; k < spec.p; ++k) {
          const auto idx = coef_index(a, j, k, spec.p);
          os << "summary_bias," << sc << ',' << cc << ",,," << a << ',' << j << ',' << k + 1
             << ",," << format_double(spec.beta[j - 1][a][k]) << ','
             << format_double(cs.bias[idx]) << '\n';
          os << "summary_ssd," << sc << ',' << cc << ",,," << a << ',' << j << ',' << k + 1
             << ",," << format_double(spec.beta[j - 1][a][k]) << ','
             << format_double(cs.ssd[idx]) << '\n';
        }
  }
  return os.str();
}

std::string report_summary(const ReplicationReport& report) {
  const auto& spec = report.spec;
  std::ostringstream os;
  os << "scenario: " << to_string(spec.tag) << '\n';
  os << "n: " << spec.n << ", R: " << report.R << ", n_test: " << report.n_test << '\n';
  os << "tau: (" << format_double(report.tau.tau1) << ", " << format_double(report.tau.tau2)
     << ")\n";
  for (const auto& cs : report.configs) {
    char line[160];
    std::snprintf(line, sizeof line, "OTIA c=%s: %.4f (failures: %d)\n", cs.c.label().c_str(),
                  cs.mean_otia, cs.failures);
    os << line;
  }
  os << "\ncoefficient bias / SSD\n";
  os << "arm outcome coef";
  for (const auto& cs : report.configs) os << "  " << cs.c.label() << " bias/ssd";
  os << '\n';
  for (int a = 0; a <= spec.K; ++a)
    for (int j = 1; j <= 2; ++j)
      for (int k = 0; k < spec.p; ++k) {
        char head[64];
        std::snprintf(head, sizeof head, "%3d %7d   b%d%d", a, j, j, k + 1);
        os << head;
        for (const auto& cs : report.configs) {
          const auto idx = coef_index(a, j, k, spec.p);
          char cell[64];
          std::snprintf(cell, sizeof cell, "  %.4f/%.4f", cs.bias[idx], cs.ssd[idx]);
          os << cell;
        }
        os << '\n';
      }
  return os.str();
}

}  // namespace bitr
