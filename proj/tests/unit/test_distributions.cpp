#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdrlab/distributions.hpp"
#include "fdrlab/quadrature.hpp"
#include "fdrlab/special.hpp"

using namespace fdrlab;

namespace {

double central_t_pdf_direct(double nu, double x) {
  return std::exp(log_gamma((nu + 1) / 2) - log_gamma(nu / 2)) / std::sqrt(nu * M_PI) *
         std::pow(1.0 + x * x / nu, -(nu + 1) / 2);
}

double central_f_pdf_direct(double p, double nu, double x) {
  double theta = p / nu;
  return std::exp(0.5 * p * std::log(theta) + (0.5 * p - 1.0) * std::log(x) -
                  0.5 * (p + nu) * std::log(1.0 + theta * x) - log_beta(p / 2, nu / 2));
}

// Test-side evaluation of the tail-limit series, term by term, from the
// explicit log-gamma/log-beta expressions; the implementation uses factor
// recurrences, so agreement checks two independent routes.
double t_limit_partial(double nu, double delta, int terms) {
  SignedLogAccumulator acc;
  for (int k = 0; k < terms; ++k) {
    double z = log_gamma((nu + k + 1) / 2.0) - log_gamma(k + 1.0) - log_gamma((nu + 1) / 2.0) +
               k * std::log(std::sqrt(2.0) * delta) - 0.5 * delta * delta;
    acc.add(z);
  }
  return acc.value();
}

double f_limit_partial(double p, double nu, double delta, int terms) {
  SignedLogAccumulator acc;
  for (int k = 0; k < terms; ++k) {
    double z = k * std::log(0.5 * delta) - log_beta(p / 2 + k, nu / 2) - log_gamma(k + 1.0);
    acc.add(z);
  }
  return std::exp(-0.5 * delta + log_beta(p / 2, nu / 2)) * acc.value();
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("validation rejects bad parameters") {
  CHECK_THROWS_AS(validate(DistributionSpec{NormalSpec{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(DistributionSpec{NoncentralTSpec{-1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(DistributionSpec{NoncentralFSpec{2.0, 3.0, -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(DistributionSpec{GaussianMixtureSpec{{{0.5, 0.0, 1.0}}}}),
                  std::invalid_argument);  // weights must sum to 1
  CHECK_THROWS_AS(validate(DistributionSpec{CauchyScaleSpec{0.0}}), std::invalid_argument);
  CHECK_NOTHROW(validate(DistributionSpec{GaussianMixtureSpec{{{1.0, 2.0, 1.0}}}}));
}

TEST_CASE("noncentral t density reduces to central at delta = 0") {
  DistributionSpec t10{NoncentralTSpec{10.0, 0.0}};
  for (double x : {-3.0, -0.5, 0.0, 1.0, 7.5})
    CHECK(pdf(t10, x) == doctest::Approx(central_t_pdf_direct(10.0, x)).epsilon(1e-13));
}

TEST_CASE("noncentral t density at the origin") {
  // at x = 0 only the k = 0 series term survives: t_nu(0) e^{-delta^2/2}
  DistributionSpec t{NoncentralTSpec{10.0, 1.0}};
  CHECK(pdf(t, 0.0) ==
        doctest::Approx(central_t_pdf_direct(10.0, 0.0) * std::exp(-0.5)).epsilon(1e-13));
}

TEST_CASE("noncentral F density reduces to central at delta = 0") {
  DistributionSpec f{NoncentralFSpec{10.0, 10.0, 0.0}};
  for (double x : {0.05, 0.5, 1.0, 2.5, 40.0})
    CHECK(pdf(f, x) == doctest::Approx(central_f_pdf_direct(10.0, 10.0, x)).epsilon(1e-13));
  CHECK(pdf(f, -1.0) == 0.0);
}

TEST_CASE("noncentral series densities integrate to one") {
  for (auto spec : {DistributionSpec{NoncentralTSpec{10.0, 1.0}},
                    DistributionSpec{NoncentralTSpec{5.0, 2.5}}}) {
    // +-300 keeps the truncated polynomial tail below 1e-10 even at nu = 5
    auto f = [&](double x) { return pdf(spec, x); };
    QuadratureResult r = integrate(f, -300.0, 300.0, 1e-10, 16384);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  }
  for (auto spec : {DistributionSpec{NoncentralFSpec{10.0, 10.0, 3.0}},
                    DistributionSpec{NoncentralFSpec{20.0, 30.0, 30.0}}}) {
    auto f = [&](double x) { return pdf(spec, x); };
    QuadratureResult r = integrate(f, 0.0, 2000.0, 1e-10, 16384);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("t density reflection symmetry") {
  DistributionSpec plus{NoncentralTSpec{7.0, 1.8}};
  DistributionSpec minus{NoncentralTSpec{7.0, -1.8}};
  for (double x = -30.0; x <= 30.0; x += 0.7)
    CHECK(pdf(plus, x) == doctest::Approx(pdf(minus, -x)).epsilon(1e-11));
}

TEST_CASE("noncentral t cdf against a sampling oracle") {
  DistributionSpec t{NoncentralTSpec{10.0, 1.0}};
  Engine eng = make_engine(7, 0);
  const std::size_t n = 10000000;
  std::size_t below = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (sample(t, eng) <= 1.0) ++below;
  double hat = static_cast<double>(below) / n;
  double se = std::sqrt(hat * (1.0 - hat) / n);
  CHECK(std::abs(cdf(t, 1.0) - hat) < 3.0 * se);
}

TEST_CASE("cdf anchors and monotonicity") {
  CHECK(cdf(DistributionSpec{NormalSpec{0.0, 1.0}}, 0.0) == doctest::Approx(0.5));
  CHECK(cdf(DistributionSpec{CauchyScaleSpec{3.0}}, 0.0) == doctest::Approx(0.5));
  DistributionSpec f{NoncentralFSpec{10.0, 10.0, 3.0}};
  double prev = -1.0;
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    double c = cdf(f, x);
    CHECK(c >= prev);
    CHECK(c <= 1.0);
    prev = c;
  }
}

TEST_CASE("quantile round trips across families") {
  std::vector<DistributionSpec> specs = {
      DistributionSpec{NormalSpec{0.0, 1.0}},
      DistributionSpec{NoncentralTSpec{10.0, 1.0}},
      DistributionSpec{NoncentralFSpec{10.0, 10.0, 3.0}},
      DistributionSpec{GaussianMixtureSpec{{{0.5, -1.3, 0.015}, {0.5, 1.0, 0.015}}}},
      DistributionSpec{CauchyScaleSpec{2.0}}};
  for (const auto& spec : specs) {
    for (double q : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
      double x = quantile(spec, q);
      CHECK(std::abs(cdf(spec, x) - q) <= 1e-9);
    }
    CHECK_THROWS_AS(quantile(spec, 0.0), std::domain_error);
    CHECK_THROWS_AS(quantile(spec, 1.0), std::domain_error);
  }
  CHECK(quantile(DistributionSpec{NormalSpec{0.0, 1.0}}, 0.5) == doctest::Approx(0.0));
  CHECK(quantile(DistributionSpec{NormalSpec{0.0, 1.0}}, 0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-10));
}

TEST_CASE("upper_quantile keeps tail precision") {
  DistributionSpec mix{GaussianMixtureSpec{{{0.5, -1.3, 0.015}, {0.5, 1.0, 0.015}}}};
  for (double q : {1e-9, 1e-6, 1e-3, 0.3}) {
    double x = upper_quantile(mix, q);
    CHECK(survival(mix, x) == doctest::Approx(q).epsilon(1e-9));
  }
  DistributionSpec norm{NormalSpec{0.0, 1.0}};
  CHECK(survival(norm, upper_quantile(norm, 1e-12)) == doctest::Approx(1e-12).epsilon(1e-12));
  DistributionSpec cau{CauchyScaleSpec{1.0}};
  CHECK(survival(cau, upper_quantile(cau, 1e-10)) == doctest::Approx(1e-10).epsilon(1e-12));
}

TEST_CASE("sampler matches the quadrature cdf (KS oracle)") {
  DistributionSpec t{NoncentralTSpec{10.0, 1.0}};
  Engine eng = make_engine(11, 0);
  const std::size_t n = 1000000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample(t, eng);
  std::sort(draws.begin(), draws.end());
  // Evaluate the cdf on a subsample of order statistics; between the
  // evaluation points the deviation can move by at most the cdf increment
  // plus the empirical step, which the slack term covers.
  const std::size_t stride = 61;
  double stat = 0.0, prev_cdf = 0.0, max_gap = 0.0;
  for (std::size_t i = stride; i < n; i += stride) {
    double c = cdf(t, draws[i]);
    stat = std::max(stat, std::abs(c - static_cast<double>(i) / n));
    max_gap = std::max(max_gap, c - prev_cdf);
    prev_cdf = c;
  }
  double slack = max_gap + static_cast<double>(stride) / n;
  double ks_critical_1pct = 1.628 / std::sqrt(static_cast<double>(n));
  CHECK(stat + slack < ks_critical_1pct);
}

TEST_CASE("degenerate one-component mixture sampling") {
  DistributionSpec mix{GaussianMixtureSpec{{{1.0, 4.0, 2.0}}}};
  Engine eng = make_engine(3, 0);
  const std::size_t n = 1000000;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += sample(mix, eng);
  CHECK(std::abs(sum / n - 4.0) < 4.0 * 2.0 / 1000.0);
}

TEST_CASE("cauchy sampling median") {
  DistributionSpec cau{CauchyScaleSpec{1.0}};
  Engine eng = make_engine(5, 0);
  const std::size_t n = 100000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample(cau, eng);
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  CHECK(std::abs(draws[n / 2]) < 0.02);
}

TEST_CASE("likelihood ratio is 1 for identical specs") {
  DistributionSpec null{NoncentralTSpec{10.0, 0.0}};
  DistributionSpec alt{NoncentralTSpec{10.0, 0.0}};
  for (double x : {-5.0, 0.0, 2.0, 100.0}) CHECK(likelihood_ratio(null, alt, x) == 1.0);
  CHECK(likelihood_ratio_limit(null, alt) == 1.0);
}

TEST_CASE("likelihood ratio rejects unsupported pairs") {
  CHECK_THROWS_AS(likelihood_ratio(DistributionSpec{NormalSpec{0.0, 1.0}},
                                   DistributionSpec{CauchyScaleSpec{1.0}}, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(likelihood_ratio(DistributionSpec{NoncentralTSpec{10.0, 0.0}},
                                   DistributionSpec{NoncentralTSpec{12.0, 1.0}}, 0.0),
                  std::domain_error);
}

TEST_CASE("F-pair ratio tail evaluation approaches the limit") {
  DistributionSpec null{NoncentralFSpec{10.0, 10.0, 0.0}};
  DistributionSpec alt{NoncentralFSpec{10.0, 10.0, 3.0}};
  double at_tail = likelihood_ratio(null, alt, 1e6);
  double lim = likelihood_ratio_limit(null, alt);
  CHECK(std::abs(at_tail - lim) / lim <= 1e-4);
}

TEST_CASE("ratio monotonicity") {
  DistributionSpec fn{NoncentralFSpec{10.0, 10.0, 0.0}};
  DistributionSpec fa{NoncentralFSpec{10.0, 10.0, 3.0}};
  double prev = 0.0;
  for (double x = 0.0; x <= 100.0; x += 0.5) {
    double r = likelihood_ratio(fn, fa, x);
    CHECK(r > prev);
    prev = r;
  }
  DistributionSpec tn{NoncentralTSpec{10.0, 0.0}};
  DistributionSpec ta{NoncentralTSpec{10.0, 1.0}};
  prev = 0.0;
  for (double x = -50.0; x <= 50.0; x += 0.5) {
    double r = likelihood_ratio(tn, ta, x);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("mixture ratio peaks at the component stationary point") {
  GaussianMixtureSpec mix{{{1.0, 1.0, 0.5}}};  // sigma < 1
  DistributionSpec null{NormalSpec{0.0, 1.0}};
  DistributionSpec alt{mix};
  double xstar = 1.0 / (1.0 - 0.25);
  double best_x = 0.0, best = 0.0;
  for (double x = -4.0; x <= 4.0; x += 1e-3) {
    double r = likelihood_ratio(null, alt, x);
    if (r > best) {
      best = r;
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(xstar).epsilon(1e-2));
  CHECK(likelihood_ratio(null, alt, xstar) >= best);
}

TEST_CASE("ratio limits per mixture shape") {
  DistributionSpec null{NormalSpec{0.0, 1.0}};
  // all sigma < 1: limit 0
  CHECK(likelihood_ratio_limit(
            null, DistributionSpec{GaussianMixtureSpec{
                      {{0.5, -1.3, 0.015}, {0.5, 1.0, 0.015}}}}) == 0.0);
  // a sigma > 1 component: unbounded
  CHECK(std::isinf(likelihood_ratio_limit(
      null, DistributionSpec{GaussianMixtureSpec{
                {{0.4, -1.3, 0.015}, {0.4, 1.0, 0.015}, {0.2, 4.0, 2.0}}}})));
  // sigma = 1 with positive mean: unbounded; with zero mean: weight passes through
  CHECK(std::isinf(likelihood_ratio_limit(
      null, DistributionSpec{GaussianMixtureSpec{{{0.5, 1.0, 1.0}, {0.5, 0.0, 0.5}}}})));
  CHECK(likelihood_ratio_limit(
            null, DistributionSpec{GaussianMixtureSpec{{{0.5, 0.0, 1.0}, {0.5, 0.0, 0.5}}}}) ==
        doctest::Approx(0.5));
  // normal alt N(2,1): e^{2x-2} is unbounded
  CHECK(std::isinf(likelihood_ratio_limit(null, DistributionSpec{NormalSpec{2.0, 1.0}})));
}

TEST_CASE("t-pair limit matches the tabulated critical level") {
  DistributionSpec null{NoncentralTSpec{10.0, 0.0}};
  DistributionSpec alt{NoncentralTSpec{10.0, 1.0}};
  double lim = likelihood_ratio_limit(null, alt);
  double pi = 0.05;
  CHECK(1.0 / (1.0 - pi + pi * lim) == doctest::Approx(0.512).epsilon(2e-3));
}

TEST_CASE("limit series: two evaluation routes agree and partial sums grow") {
  double nu = 10.0, delta = 1.0;
  DistributionSpec null{NoncentralTSpec{nu, 0.0}};
  DistributionSpec alt{NoncentralTSpec{nu, delta}};
  double prev = 0.0;
  for (int terms = 1; terms <= 60; ++terms) {
    double partial = t_limit_partial(nu, delta, terms);
    CHECK(std::isfinite(partial));
    CHECK(partial >= prev);
    prev = partial;
  }
  CHECK(prev == doctest::Approx(likelihood_ratio_limit(null, alt)).epsilon(1e-12));

  DistributionSpec fnull{NoncentralFSpec{10.0, 10.0, 0.0}};
  DistributionSpec falt{NoncentralFSpec{10.0, 10.0, 3.0}};
  prev = 0.0;
  for (int terms = 1; terms <= 80; ++terms) {
    double partial = f_limit_partial(10.0, 10.0, 3.0, terms);
    CHECK(std::isfinite(partial));
    CHECK(partial >= prev);
    prev = partial;
  }
  CHECK(prev == doctest::Approx(likelihood_ratio_limit(fnull, falt)).epsilon(1e-12));
}

TEST_CASE("cauchy ratio and limits") {
  DistributionSpec null{CauchyScaleSpec{1.0}};
  DistributionSpec alt{CauchyScaleSpec{2.0}};
  CHECK(likelihood_ratio_limit(null, alt) == doctest::Approx(2.0));
  CHECK(likelihood_ratio_lower_limit(null, alt) == doctest::Approx(2.0));
  CHECK(likelihood_ratio(null, alt, 0.0) == doctest::Approx(0.5));
  CHECK(likelihood_ratio(null, alt, 1e8) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("lower limits mirror the upper ones") {
  DistributionSpec null{NoncentralTSpec{10.0, 0.0}};
  DistributionSpec alt{NoncentralTSpec{10.0, 1.0}};
  double lower = likelihood_ratio_lower_limit(null, alt);
  CHECK(lower > 0.0);
  CHECK(lower < 1.0);
  CHECK(likelihood_ratio(null, alt, -300.0) == doctest::Approx(lower).epsilon(1e-3));
  DistributionSpec fnull{NoncentralFSpec{10.0, 10.0, 0.0}};
  DistributionSpec falt{NoncentralFSpec{10.0, 10.0, 3.0}};
  CHECK(likelihood_ratio_lower_limit(fnull, falt) == doctest::Approx(std::exp(-1.5)));
}

}  // TEST_SUITE
