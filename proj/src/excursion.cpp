#include "fdrlab/excursion.hpp"

#include <cmath>
#include <stdexcept>

#include "fdrlab/special.hpp"

namespace fdrlab {

namespace {
void check_c(double c) {
  if (!(c > 0.0 && c < 1.0)) throw std::domain_error("excursion: c must be in (0, 1)");
}
}  // namespace

double tau_pmf(double c, std::size_t k) {
  check_c(c);
  if (k == 0) return 1.0 - c;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(kd) - log_gamma(kd + 1.0) + std::log1p(-c) +
                  kd * std::log(c) - kd * c);
}

TauDistribution tau_distribution(double c, double tail_eps, std::size_t min_k) {
  check_c(c);
  TauDistribution out;
  out.c = c;
  const double ratio = c * std::exp(1.0 - c);  // limit of pmf(k+1)/pmf(k), < 1
  const double geo = ratio / (1.0 - ratio);
  std::size_t k = 0;
  for (;; ++k) {
    out.pmf.push_back(tau_pmf(c, k));
    if (k >= min_k && k >= 1) {
      out.tail_bound = out.pmf.back() * geo;
      if (out.tail_bound < tail_eps) break;
    }
    if (k > 2000000) throw std::runtime_error("tau_distribution: table too long");
  }
  return out;
}

double tau_ruin_rate(double c) {
  check_c(c);
  // f(w) = wc - log(1 + w): negative on (0, w*), zero at the ruin rate.
  double hi = 1.0;
  while (hi * c - std::log1p(hi) < 0.0) hi *= 2.0;
  double lo = hi > 1.0 ? hi * 0.5 : 1e-12;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (mid * c - std::log1p(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double tau_barrier(double c, double ruin_eps) {
  return std::ceil(-std::log(ruin_eps) / tau_ruin_rate(c));
}

std::size_t simulate_tau(double c, Engine& rng, double ruin_eps) {
  check_c(c);
  const double barrier = tau_barrier(c, ruin_eps);
  std::exponential_distribution<double> exp1(1.0);
  double s = 0.0;
  std::size_t j = 0, last = 0;
  while (s < barrier) {
    ++j;
    s += exp1(rng) - c;
    if (s < 0.0) last = j;
  }
  return last;
}

double binomial_pmf(std::size_t k, std::size_t m, double q) {
  if (k > m) throw std::domain_error("binomial_pmf: k must be <= m");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("binomial_pmf: q must be in [0, 1]");
  if (q == 0.0) return k == 0 ? 1.0 : 0.0;
  if (q == 1.0) return k == m ? 1.0 : 0.0;
  const double kd = static_cast<double>(k), md = static_cast<double>(m);
  const double log_choose = -std::log(md + 1.0) - log_beta(kd + 1.0, md - kd + 1.0);
  return std::exp(log_choose + kd * std::log(q) + (md - kd) * std::log1p(-q));
}

Divergence kl_divergence(std::span<const double> p_hat, std::span<const double> p) {
  Divergence out;
  const std::size_t m = std::min(p_hat.size(), p.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (p_hat[i] == 0.0) continue;
    if (p[i] == 0.0) {
      out.finite = false;
      continue;
    }
    out.value += p_hat[i] * std::log(p_hat[i] / p[i]);
  }
  for (std::size_t i = m; i < p_hat.size(); ++i)
    if (p_hat[i] > 0.0) out.finite = false;
  return out;
}

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  double acc = 0.0;
  const std::size_t m = std::max(mu.size(), nu.size());
  for (std::size_t i = 0; i < m; ++i) {
    double a = i < mu.size() ? mu[i] : 0.0;
    double b = i < nu.size() ? nu[i] : 0.0;
    acc += std::abs(a - b);
  }
  return acc;
}

}  // namespace fdrlab
