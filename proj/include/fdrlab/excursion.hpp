#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fdrlab/rng.hpp"

namespace fdrlab {

/// Pr{tau = k} = (k^k / k!) (1 - c) c^k e^{-kc} for c in (0, 1): the limit
/// law of the rejection count below the critical level. Evaluated in log
/// space; k = 0 gives 1 - c exactly.
double tau_pmf(double c, std::size_t k);

struct TauDistribution {
  double c = 0.0;
  std::vector<double> pmf;  // k = 0 .. K
  double tail_bound = 0.0;  // analytic bound on Pr{tau > K}
  std::size_t max_k() const { return pmf.empty() ? 0 : pmf.size() - 1; }
};

/// Table up to the smallest K whose geometric tail bound (ratio c e^{1-c})
/// drops below tail_eps, and at least up to min_k.
TauDistribution tau_distribution(double c, double tail_eps = 1e-10, std::size_t min_k = 0);

/// Positive root of e^{wc} = 1 + w: the exponential change-of-measure rate
/// for the drifted walk's ruin probability.
double tau_ruin_rate(double c);

/// Absorbing barrier B(c, eps) = ceil(-ln(eps)/w) above which the walk
/// returns below 0 with probability < eps.
double tau_barrier(double c, double ruin_eps = 1e-9);

/// Simulates S_j = S_{j-1} + Exp(1) - c and returns the last j with S_j < 0,
/// stopping once the walk clears the barrier.
std::size_t simulate_tau(double c, Engine& rng, double ruin_eps = 1e-9);

/// C(m, k) q^k (1-q)^{m-k} through log_beta.
double binomial_pmf(std::size_t k, std::size_t m, double q);

struct Divergence {
  double value = 0.0;
  bool finite = true;
};

/// sum_i p_hat_i log(p_hat_i / p_i) over the common truncated support;
/// 0 log 0 = 0, and p_i = 0 with p_hat_i > 0 flags an infinite divergence.
Divergence kl_divergence(std::span<const double> p_hat, std::span<const double> p);

/// Unhalved total variation distance sum_k |mu_k - nu_k| (maximum 2).
double tv_distance(std::span<const double> mu, std::span<const double> nu);

}  // namespace fdrlab
