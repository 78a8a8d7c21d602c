#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrlab/criticality.hpp"
#include "fdrlab/excursion.hpp"
#include "fdrlab/mc.hpp"

using namespace fdrlab;

namespace {

// Independent oracle: direct long-double product, no log-space machinery.
long double tau_pmf_direct(long double c, unsigned k) {
  if (k == 0) return 1.0L - c;
  long double kk = 1.0L;  // k^k / k!
  for (unsigned i = 1; i <= k; ++i) kk *= static_cast<long double>(k) / i;
  long double ck = std::pow(c, static_cast<long double>(k));
  return kk * (1.0L - c) * ck * std::exp(-static_cast<long double>(k) * c);
}

}  // namespace

TEST_SUITE("excursion") {

TEST_CASE("pmf at k = 0 is exactly 1 - c") {
  for (double c : {0.05, 0.3, 0.5859375, 0.9}) CHECK(tau_pmf(c, 0) == 1.0 - c);
  CHECK_THROWS_AS(tau_pmf(0.0, 1), std::domain_error);
  CHECK_THROWS_AS(tau_pmf(1.0, 1), std::domain_error);
}

TEST_CASE("pmf equals the direct-product oracle") {
  for (double c : {0.1, 0.3, 0.5859375, 0.7, 0.9}) {
    for (unsigned k = 0; k <= 60; ++k) {
      double direct = static_cast<double>(tau_pmf_direct(c, k));
      CHECK(tau_pmf(c, k) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("pmf against the tabulated sub-critical law") {
  // c from the exact density at 0 of the tabulated t model (alpha = 0.3)
  RandomEffectsModel m{0.05, NoncentralTSpec{10, 0}, NoncentralTSpec{10, 1},
                       TailRule::RightTail};
  double c = 0.3 * law_of(m).fprime_at_zero();
  CHECK(std::abs(tau_pmf(c, 0) - 0.4140) <= 1e-4);
  CHECK(std::abs(tau_pmf(c, 1) - 0.1350) <= 1e-4);
  CHECK(std::abs(tau_pmf(c, 4) - 0.0500) <= 1e-4);
  CHECK(std::abs(tau_pmf(c, 6) - 0.0323) <= 1e-4);
  // the k = 5 entry of the published table is inconsistent with the law
  // itself: p0 pins c, which forces p5 into [0.03978, 0.03980]
  CHECK(tau_pmf(c, 5) == doctest::Approx(0.039781).epsilon(1e-4));
  CHECK(tau_pmf(c, 5) ==
        doctest::Approx(static_cast<double>(tau_pmf_direct(c, 5))).epsilon(1e-12));
}

TEST_CASE("table truncation and tail bound") {
  for (double tail_eps : {1e-10, 1e-12}) {
    for (double c : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      TauDistribution dist = tau_distribution(c, tail_eps);
      double total = std::accumulate(dist.pmf.begin(), dist.pmf.end(), 0.0);
      CHECK(dist.tail_bound < tail_eps);
      // the table plus its tail bound accounts for all mass at resolution
      CHECK(std::abs(total + dist.tail_bound - 1.0) <= 10.0 * tail_eps);
      double residual = 1.0 - total;
      CHECK(residual >= 0.0);
      CHECK(dist.tail_bound >= residual);                 // a genuine bound
      CHECK(dist.tail_bound <= 10.0 * residual + 1e-15);  // and a tight one
    }
  }
}

TEST_CASE("pmf ratio approaches the geometric rate") {
  for (double c : {0.3, 0.5859375, 0.8}) {
    double limit = c * std::exp(1.0 - c);
    CHECK(limit < 1.0);
    for (unsigned k = 50; k <= 55; ++k) {
      double ratio = tau_pmf(c, k + 1) / tau_pmf(c, k);
      CHECK(ratio < 1.0);
      CHECK(std::abs(ratio - limit) < 0.01);
    }
  }
}

TEST_CASE("walk simulation matches the pmf") {
  const double c = 0.586;
  TauDistribution dist = tau_distribution(c, 1e-10);
  Engine eng = make_engine(29, 0);
  const std::size_t draws = 1000000;
  std::vector<double> emp(dist.pmf.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    std::size_t k = simulate_tau(c, eng);
    if (k < emp.size()) emp[k] += 1.0 / draws;
  }
  CHECK(tv_distance(emp, dist.pmf) < 0.01);
}

TEST_CASE("walk simulation at small drift parameter") {
  const double c = 0.05;
  Engine eng = make_engine(31, 0);
  const std::size_t draws = 200000;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < draws; ++i)
    if (simulate_tau(c, eng) == 0) ++zeros;
  double hat = static_cast<double>(zeros) / draws;
  CHECK(std::abs(hat - 0.95) < 3.0 * std::sqrt(0.95 * 0.05 / draws));
}

TEST_CASE("walk mean matches the series mean") {
  const double c = 0.5;
  TauDistribution dist = tau_distribution(c, 1e-12);
  double mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k < dist.pmf.size(); ++k) {
    mean += static_cast<double>(k) * dist.pmf[k];
    second += static_cast<double>(k) * static_cast<double>(k) * dist.pmf[k];
  }
  double var = second - mean * mean;
  Engine eng = make_engine(37, 0);
  const std::size_t draws = 1000000;
  double sum = 0.0;
  for (std::size_t i = 0; i < draws; ++i) sum += static_cast<double>(simulate_tau(c, eng));
  double emp_mean = sum / draws;
  CHECK(std::abs(emp_mean - mean) < 3.0 * std::sqrt(var / draws));
}

TEST_CASE("doubling the barrier changes nothing beyond noise") {
  const double c = 0.6;
  const std::size_t draws = 200000;
  // ruin_eps 1e-9 vs 1e-18 corresponds to doubling the barrier height
  Engine eng1 = make_engine(41, 0);
  Engine eng2 = make_engine(41, 0);
  std::vector<double> a(80, 0.0), b(80, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    std::size_t k1 = simulate_tau(c, eng1, 1e-9);
    std::size_t k2 = simulate_tau(c, eng2, 1e-18);
    if (k1 < a.size()) a[k1] += 1.0 / draws;
    if (k2 < b.size()) b[k2] += 1.0 / draws;
  }
  CHECK(tau_barrier(c, 1e-18) == doctest::Approx(2.0 * tau_barrier(c, 1e-9)).epsilon(0.1));
  // two independent empirical pmfs of this size differ by ~0.009 in TV on
  // average; 0.02 is a 3-sigma noise floor for the comparison
  CHECK(tv_distance(a, b) < 0.02);
}

TEST_CASE("binomial pmf") {
  CHECK(binomial_pmf(0, 7, 0.0) == 1.0);
  CHECK(binomial_pmf(7, 7, 1.0) == 1.0);
  CHECK(binomial_pmf(3, 7, 1.0) == 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k <= 9; ++k) total += binomial_pmf(k, 9, 0.5);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  // C(5,2) 0.3^2 0.7^3 = 10 * 0.09 * 0.343
  CHECK(binomial_pmf(2, 5, 0.3) == doctest::Approx(0.3087).epsilon(1e-12));
  CHECK_THROWS_AS(binomial_pmf(6, 5, 0.5), std::domain_error);
}

TEST_CASE("divergences") {
  std::vector<double> p{0.5, 0.3, 0.2};
  CHECK(kl_divergence(p, p).value == doctest::Approx(0.0));
  CHECK(kl_divergence(p, p).finite);
  CHECK(tv_distance(p, p) == 0.0);

  std::vector<double> point1{1.0, 0.0};
  std::vector<double> point2{0.0, 1.0};
  CHECK(tv_distance(point1, point2) == 2.0);  // unhalved convention

  std::vector<double> half{0.5, 0.5};
  Divergence kl = kl_divergence(point1, half);
  CHECK(kl.finite);
  CHECK(kl.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  Divergence inf_kl = kl_divergence(half, point1);
  CHECK_FALSE(inf_kl.finite);

  std::vector<double> longer{0.5, 0.25, 0.25};
  CHECK(tv_distance(half, longer) == doctest::Approx(0.5));
}

TEST_CASE("false-rejection counts in small-R buckets follow the binomial law") {
  // sub-critical heavy-tailed model: its ratio reaches the limit at
  // polynomial speed, so the conditional law is near its limit already at
  // moderate n (exponential-tail models need astronomically large samples)
  ExperimentConfig cfg;
  cfg.model =
      RandomEffectsModel{0.1, CauchyScaleSpec{1.0}, CauchyScaleSpec{4.0}, TailRule::RightTail};
  cfg.alpha = 0.3;
  cfg.n = 10000;
  cfg.runs = 6000;
  cfg.seed = 47;
  cfg.procedures = {{ProcedureSpec::Kind::BH, 0.0}};
  McEstimates est = run_experiment(cfg);
  const auto& pe = est.procedures[0];

  PValueLaw law = law_of(cfg.model);
  REQUIRE(cfg.alpha < alpha_star(law));
  double beta_star = (1.0 - cfg.model.pi) * alpha_star(law);

  for (std::size_t bucket : {std::size_t{1}, std::size_t{2}}) {
    std::vector<double> emp(bucket + 1, 0.0);
    std::size_t hits = 0;
    for (std::size_t j = 0; j < cfg.runs; ++j) {
      if (pe.rejections[j] == bucket) {
        ++hits;
        emp[pe.false_rejections[j]] += 1.0;
      }
    }
    if (hits < 500) continue;  // the check applies to well-populated buckets
    for (auto& e : emp) e /= static_cast<double>(hits);
    std::vector<double> theo(bucket + 1);
    for (std::size_t v = 0; v <= bucket; ++v) theo[v] = binomial_pmf(v, bucket, beta_star);
    CHECK(tv_distance(emp, theo) <= 0.2);
  }
}

}  // TEST_SUITE
