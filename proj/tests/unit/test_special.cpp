#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fdrlab/quadrature.hpp"
#include "fdrlab/special.hpp"

using namespace fdrlab;

TEST_SUITE("special") {

TEST_CASE("log_gamma at exact points") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
}

TEST_CASE("log_gamma recurrence over the working range") {
  // log Gamma(x+1) = log Gamma(x) + log x, from tiny to huge arguments
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> expo(-3.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    double x = std::pow(10.0, expo(rng));
    double lhs = log_gamma(x + 1.0);
    double rhs = log_gamma(x) + std::log(x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("log_gamma Stirling asymptotics at 1e6") {
  double x = 1e6;
  double stirling = (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * M_PI) +
                    1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
  CHECK(log_gamma(x) == doctest::Approx(stirling).epsilon(1e-13));
}

TEST_CASE("log_gamma domain errors") {
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
}

TEST_CASE("log_beta exact and symmetric") {
  CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_beta(2.0, 3.0) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-14));
  CHECK(log_beta(7.25, 0.5) == doctest::Approx(log_beta(0.5, 7.25)).epsilon(1e-15));
  CHECK_THROWS_AS(log_beta(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_beta(1.0, -2.0), std::domain_error);
}

TEST_CASE("log_beta(10.5, 5) against the defining integral") {
  auto integrand = [](double t) { return std::pow(t, 9.5) * std::pow(1.0 - t, 4.0); };
  QuadratureResult direct = integrate(integrand, 0.0, 1.0, 1e-14);
  REQUIRE(direct.converged);
  CHECK(std::exp(log_beta(10.5, 5.0)) == doctest::Approx(direct.value).epsilon(1e-11));
}

TEST_CASE("normal quantile round trips") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
    double z = normal_quantile(p);
    CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal tail identities") {
  for (double z : {-8.0, -2.0, 0.0, 1.0, 5.5, 12.0}) {
    CHECK(normal_cdf(z) + normal_survival(z) == doctest::Approx(1.0).epsilon(1e-14));
  }
  // deep-tail relative accuracy: survival(10) ~ 7.6e-24 yet must stay exact
  CHECK(normal_survival(10.0) == doctest::Approx(7.61985302416053e-24).epsilon(1e-10));
}

TEST_CASE("signed log accumulation with cancellation") {
  SignedLogAccumulator acc;
  acc.add(std::log(5.0));
  acc.add(std::log(3.0), true);
  acc.add(std::log(1.0), true);
  CHECK(acc.value() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(acc.sign() == 1);

  SignedLogAccumulator zero;
  zero.add(std::log(2.0));
  zero.add(std::log(2.0), true);
  CHECK(zero.sign() == 0);
  CHECK(zero.value() == 0.0);
}

TEST_CASE("adaptive quadrature handles narrow spikes") {
  // unit-mass Gaussian with sd 0.015 inside a wide interval
  auto spike = [](double x) {
    double z = (x - 0.3) / 0.015;
    return std::exp(-0.5 * z * z) / (0.015 * std::sqrt(2.0 * M_PI));
  };
  QuadratureResult r = integrate(spike, -20.0, 20.0, 1e-10);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

}  // TEST_SUITE
