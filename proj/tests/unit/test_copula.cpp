#include <doctest.h>

#include <cmath>

#include "bitr/copula.hpp"
#include "bitr/itr.hpp"
#include "bitr/numeric.hpp"
#include "bitr/simulation.hpp"
#include "helpers.hpp"

using namespace bitr;
using testing::obs;

namespace {

CensoringModel no_censoring() {
  return fit_km_censoring(Dataset({obs(1, 1, 1, 1, 0, {0.0, 0.0})}, 2), 1);
}

MarginalFit marginal(std::vector<double> beta, int outcome) {
  MarginalFit m;
  m.beta = std::move(beta);
  m.gamma = 1.0;
  m.outcome = outcome;
  return m;
}

// Uncensored arm whose normal-score errors are Clayton(theta) linked.
Dataset clayton_arm(double theta, std::size_t n, std::uint64_t seed, const MarginalFit& m1,
                    const MarginalFit& m2) {
  Rng rng(seed);
  std::vector<Observation> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> x{rng.uniform(-2.8, 2.8), rng.uniform(-2.8, 2.8)};
    const auto [u, v] = clayton_sample(theta, rng);
    const double l1 = m1.linear_index(x) - normal_quantile(u);
    const double l2 = m2.linear_index(x) - normal_quantile(v);
    rows.push_back(obs(std::exp(l1), std::exp(l2), 1, 1, 0, x));
  }
  return Dataset(std::move(rows), 2);
}

double mixed_partial(CopulaFamily fam, double u, double v, double theta, double h) {
  return (link_eval(fam, u + h, v + h, theta) - link_eval(fam, u + h, v - h, theta) -
          link_eval(fam, u - h, v + h, theta) + link_eval(fam, u - h, v - h, theta)) /
         (4 * h * h);
}

}  // namespace

TEST_SUITE("copula") {

TEST_CASE("Clayton hand values") {
  CHECK(link_eval(CopulaFamily::Clayton, 0.5, 0.5, 2.0) ==
        doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-14));
  CHECK(copula_density(CopulaFamily::Clayton, 0.5, 0.5, 2.0) ==
        doctest::Approx(192.0 / std::pow(7.0, 2.5)).epsilon(1e-13));
  // θ = 0.01 sits 1.1e-3 above independence; the limit itself is checked at 1e-4.
  CHECK(link_eval(CopulaFamily::Clayton, 0.3, 0.6, 0.01) ==
        doctest::Approx(0.181100979862861037).epsilon(1e-12));
  CHECK(std::abs(link_eval(CopulaFamily::Clayton, 0.3, 0.6, 1e-4) - 0.18) <= 1e-3);
  CHECK(std::abs(copula_density(CopulaFamily::Clayton, 0.3, 0.6, 1e-3) - 1.0) <= 1e-2);
  CHECK(std::abs(copula_density(CopulaFamily::Clayton, 0.9, 0.1, 1e-3) - 1.0) <= 1e-2);
}

TEST_CASE("margins are recovered at the unit boundary") {
  for (auto fam : kAllFamilies)
    for (double theta : {1.5, 3.0, 10.0}) {
      CHECK(std::abs(link_eval(fam, 0.5, 1.0 - 1e-12, theta) - 0.5) <= 1e-9);
      CHECK(std::abs(link_eval(fam, 1.0 - 1e-12, 0.3, theta) - 0.3) <= 1e-9);
      CHECK(std::abs(link_eval(fam, 1.0 - 1e-12, 1.0 - 1e-12, theta) - 1.0) <= 1e-9);
    }
  CHECK(link_eval(CopulaFamily::Frank, 0.4, 1.0 - 1e-12, -4.0) == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("Frechet bounds hold on a grid") {
  for (auto fam : kAllFamilies)
    for (double theta : {1.01, 1.5, 2.0, 5.0, 20.0, 45.0})
      for (double u = 0.05; u < 1.0; u += 0.1)
        for (double v = 0.05; v < 1.0; v += 0.1) {
          const double c = link_eval(fam, u, v, theta);
          CHECK(c >= std::max(u + v - 1.0, 0.0) - 1e-15);
          CHECK(c <= std::min(u, v) + 1e-15);
        }
  for (double theta : {-30.0, -2.0, -0.5})
    for (double u = 0.05; u < 1.0; u += 0.1)
      for (double v = 0.05; v < 1.0; v += 0.1) {
        const double c = link_eval(CopulaFamily::Frank, u, v, theta);
        CHECK(c >= std::max(u + v - 1.0, 0.0) - 1e-15);
        CHECK(c <= std::min(u, v) + 1e-15);
      }
}

TEST_CASE("closed-form densities match numerical mixed partials") {
  const double grid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (auto fam : kAllFamilies)
    for (double theta : {1.5, 2.0, 3.0})
      for (double u : grid)
        for (double v : grid) {
          const double fd = mixed_partial(fam, u, v, theta, 1e-5);
          const double exact = copula_density(fam, u, v, theta);
          INFO(to_string(fam) << " theta " << theta << " u " << u << " v " << v);
          CHECK(std::abs(fd - exact) <= 1e-4 * std::abs(exact));
          CHECK(log_copula_density(fam, u, v, theta) == doctest::Approx(std::log(exact)).epsilon(1e-12));
        }
}

TEST_CASE("domain violations are rejected") {
  CHECK_THROWS_AS(check_theta(CopulaFamily::Clayton, 0.0), CopulaDomainError);
  CHECK_THROWS_AS(check_theta(CopulaFamily::Gumbel, 0.9), CopulaDomainError);
  CHECK_THROWS_AS(check_theta(CopulaFamily::Frank, 0.0), CopulaDomainError);
  CHECK_THROWS_AS(link_eval(CopulaFamily::Clayton, 0.5, 0.5, -1.0), CopulaDomainError);
  CHECK_THROWS_AS(copula_density(CopulaFamily::Gumbel, 1.2, 0.5, 2.0), CopulaDomainError);
  CHECK_THROWS_AS(copula_family_from_string("gaussian"), std::invalid_argument);
  CHECK(copula_family_from_string("Clayton") == CopulaFamily::Clayton);
}

TEST_CASE("joint survival composes the margins") {
  const auto spec = make_scenario(Scenario::Main);
  const MarginalFit m1 = marginal({1.5, 1.0}, 1), m2 = marginal({1.0, 1.5}, 2);
  CopulaFit cf;
  cf.family = CopulaFamily::Clayton;
  cf.theta = 2.0;
  const std::vector<double> x0{0.0, 0.0};
  CHECK(joint_survival(1.0, 1.0, x0, m1, m2, cf) ==
        doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-14));
  CHECK(true_joint_survival(spec, 1.0, 1.0, x0, 0) ==
        doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-14));

  const std::vector<double> x{0.4, -1.1};
  for (auto fam : kAllFamilies) {
    cf.family = fam;
    cf.theta = 2.5;
    CHECK(std::abs(joint_survival(1e-10, 2.0, x, m1, m2, cf) - marginal_survival(2.0, x, m2)) <= 1e-6);
    double prev = 1.0;
    for (double t = 0.05; t < 50.0; t *= 1.3) {
      const double s = joint_survival(t, 1.0, x, m1, m2, cf);
      CHECK(s <= prev + 1e-15);
      CHECK(joint_survival(t, 2.0, x, m1, m2, cf) <= s + 1e-15);
      prev = s;
    }
  }
}

TEST_CASE("theta is recovered on clean Clayton data") {
  const MarginalFit m1 = marginal({1.5, 1.0}, 1), m2 = marginal({1.0, 1.5}, 2);
  const auto G = no_censoring();
  for (double theta : {2.0, 3.0}) {
    const Dataset arm = clayton_arm(theta, 2000, 7 + static_cast<std::uint64_t>(theta), m1, m2);
    const auto fit = fit_theta(arm, m1, m2, G, G, CopulaFamily::Clayton);
    INFO("theta " << theta << " fitted " << fit.theta);
    CHECK(std::abs(fit.theta - theta) <= 0.25);
    CHECK_FALSE(fit.at_boundary);
  }
}

TEST_CASE("golden-section trace never increases") {
  const MarginalFit m1 = marginal({1.5, 1.0}, 1), m2 = marginal({1.0, 1.5}, 2);
  const auto G = no_censoring();
  const Dataset arm = clayton_arm(2.5, 400, 3, m1, m2);
  for (auto fam : kAllFamilies) {
    const auto fit = fit_theta(arm, m1, m2, G, G, fam);
    REQUIRE(fit.trace.size() > 5);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) CHECK(fit.trace[i] <= fit.trace[i - 1]);
    const auto rows = pseudo_observations(arm, m1, m2, G, G);
    CHECK(fit.neg_loglik == doctest::Approx(copula_neg_loglik(fam, fit.theta, rows)));
  }
}

TEST_CASE("no doubly-uncensored rows means no theta") {
  std::vector<Observation> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(obs(1.0 + i, 2.0, i % 2, (i + 1) % 2, 0, {0.1 * i, 0.0}));
  const Dataset arm(std::move(rows), 2);
  const MarginalFit m1 = marginal({1.0, 0.0}, 1), m2 = marginal({0.0, 1.0}, 2);
  const auto G1 = fit_km_censoring(arm, 1), G2 = fit_km_censoring(arm, 2);
  CHECK_THROWS_AS(fit_theta(arm, m1, m2, G1, G2, CopulaFamily::Clayton), InsufficientDataError);
}

TEST_CASE("link selection") {
  const MarginalFit m1 = marginal({1.5, 1.0}, 1), m2 = marginal({1.0, 1.5}, 2);
  const auto G = no_censoring();
  const Dataset small = clayton_arm(3.0, 100, 1, m1, m2);
  CHECK(select_link_cv(small, m1, m2, G, G, {CopulaFamily::Gumbel}).family == CopulaFamily::Gumbel);

  int clayton = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const Dataset arm = clayton_arm(3.0, 500, 1000 + r, m1, m2);
    const auto sel = select_link_cv(arm, m1, m2, G, G, kAllFamilies, 5, r);
    REQUIRE(sel.cv_risk.size() == 3);
    clayton += sel.family == CopulaFamily::Clayton;
  }
  INFO("Clayton chosen " << clayton << " of 20");
  CHECK(clayton >= 14);

  const Dataset arm = clayton_arm(3.0, 300, 55, m1, m2);
  const auto a = select_link_cv(arm, m1, m2, G, G, kAllFamilies, 5, 9);
  const auto b = select_link_cv(arm, m1, m2, G, G, kAllFamilies, 5, 9);
  CHECK(a.family == b.family);
  CHECK(a.cv_risk == b.cv_risk);
}

TEST_CASE("main-scenario arm 2 dependence is recovered on average") {
  // Pipeline estimate of theta_2 = 3 with the Clayton link, n = 200, 20 draws.
  auto spec = make_scenario(Scenario::Main, 200);
  ItrOptions opts;
  double total = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const Dataset d = generate_dataset(spec, mix_seed(spec.seed, 5000 + r));
    const Dataset arm = split_by_arm(d, 2);
    opts.seed = mix_seed(spec.seed, 6000 + r);
    const Nuisance nu = fit_nuisance(d, opts);
    const JointModel jm = fit_joint_model(d, nu, {0.0, 0.0}, opts);
    const auto fit = fit_theta(arm, jm.arms[2].m1, jm.arms[2].m2, nu.G[0][2], nu.G[1][2],
                               CopulaFamily::Clayton);
    total += fit.theta;
  }
  const double mean = total / reps;
  INFO("mean theta-hat for arm 2: " << mean);
  CHECK(std::abs(mean - 3.0) <= 1.0);
}

}
