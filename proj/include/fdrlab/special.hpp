#pragma once

#include <limits>

namespace fdrlab {

/// Natural log of the Gamma function. Throws std::domain_error for x <= 0.
double log_gamma(double x);

/// log B(a, b) = log_gamma(a) + log_gamma(b) - log_gamma(a + b).
double log_beta(double a, double b);

/// Standard normal CDF / survival function / density, accurate in both tails.
double normal_cdf(double z);
double normal_survival(double z);
double normal_pdf(double z);
double log_normal_pdf(double z);

/// Inverse of the standard normal CDF for p in (0, 1).
double normal_quantile(double p);

/// log(e^a + e^b); tolerates -inf arguments.
double log_add_exp(double a, double b);

/// Accumulates sum_k s_k * exp(z_k) keeping positive and negative parts in
/// log space; the (possible) cancellation happens once, at readout.
class SignedLogAccumulator {
 public:
  void add(double log_abs, bool negative = false);
  double log_abs() const;  // log |sum|, -inf when the sum is 0
  int sign() const;        // -1, 0, +1
  double value() const;

 private:
  double log_pos_ = -std::numeric_limits<double>::infinity();
  double log_neg_ = -std::numeric_limits<double>::infinity();
};

}  // namespace fdrlab
