#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fdrlab/pvalue_law.hpp"

namespace fdrlab {

/// Critical target level alpha* = inf_{u>0} u/F(u). Uses 1/F'(0) when the
/// law is concave; otherwise minimizes over the refined grid (including the
/// u -> 0+ and u = 1 boundary candidates). 0 when F'(0) is infinite.
double alpha_star(const PValueLaw& law);

/// The direct grid minimizer, independent of the concavity shortcut.
double alpha_star_generic(const PValueLaw& law);

struct FixedPointResult {
  double u_star = 0.0;  // largest fixed point of u = alpha F(u)
  double p_star = 0.0;  // F(u_star) = u_star / alpha when positive
  bool converged = false;
  std::size_t iterations = 0;
};

/// Iterates u <- alpha F(u) from u = 1 (tolerance 1e-13, at most 1e6 steps),
/// with a bisection fallback near tangency.
FixedPointResult u_star(const PValueLaw& law, double alpha);

struct LilConstants {
  double lambda = 0.0;        // sqrt(2 p* q*) / (1 - alpha F'(u*))
  double fprime_u_star = 0.0;
  double delta_gap = 0.0;     // 1 - alpha F'(u*)
  double p_star = 0.0;
  bool tangent = false;       // delta_gap <= 0: constants undefined
};

/// Requires alpha > alpha*(law); throws std::domain_error otherwise.
LilConstants lil_lambda(const PValueLaw& law, double alpha);

/// Plug-in form of the fluctuation constant.
double lil_lambda_value(double p_star, double fprime_u_star, double alpha);

/// Almost-sure limits (u_t^-, u_t^+) of the backward/forward rejection
/// endpoints at reference point t; returns (t, t) when nothing beyond the
/// trivial point is rejectable.
std::pair<double, double> u_t_pm(const PValueLaw& law, double alpha, double t);

/// G(u*) = ((1 - alpha)/pi + alpha) p*: the large-sample BH power.
double asymptotic_bh_power(const PValueLaw& law, double alpha);

struct ProcMPower {
  double rejected_mass = 0.0;  // maximal disjoint sum of p-value mass
  double power = 0.0;          // ((1 - alpha)/pi + alpha) * rejected_mass
  std::vector<double> selected;
  std::vector<std::pair<double, double>> intervals;  // [u_t^-, u_t^+] per selected t
  /// Reference points whose t - alpha F(t) values collide within 1e-9; the
  /// selection is reported anyway but may be non-unique.
  std::vector<std::pair<double, double>> degenerate_pairs;
};

/// Large-sample power of the multi-reference-point procedure: maximizes the
/// disjoint-interval mass over subsets of reference points.
ProcMPower asymptotic_procm_power(const PValueLaw& law, double alpha,
                                  const std::vector<double>& refpoints);

/// (2l - 2)/(2l - 1) for l >= 2 (growth exponent at tangency).
double nu0_exponent(long ell);

/// max_u F'(u); +inf for unbounded likelihood ratios.
double sup_fprime(const PValueLaw& law);

struct CriticalitySummary {
  double alpha = 0.0;
  double alpha_star = 0.0;
  double beta_star = 0.0;  // (1 - pi) alpha_star
  double sup_fprime = 0.0;
  double u_star = 0.0;
  double p_star = 0.0;
  double q_star = 1.0;     // 1 - p_star
  double delta_gap = 1.0;  // 1 - alpha F'(u*)
  std::optional<double> lil_lambda;
  std::optional<double> fprime_u_star;
  std::optional<double> nu0;
  bool u_star_converged = true;
  bool tangent = false;
};

/// All per-(law, alpha) theory quantities in one report. The tangency order
/// ell is caller-supplied (numerical detection is ill-conditioned).
CriticalitySummary summarize_criticality(const PValueLaw& law, double alpha,
                                         std::optional<long> ell = std::nullopt);

}  // namespace fdrlab
