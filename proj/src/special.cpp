#include "fdrlab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace fdrlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("log_beta: arguments must be > 0");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_survival(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0, 1)");

  // Acklam's rational approximation, then one Halley step on the residual.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement; the residual is evaluated on the smaller tail so the
  // subtraction keeps full relative precision.
  double e = (p < 0.5) ? (normal_cdf(x) - p) : ((1.0 - p) - normal_survival(x));
  double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

void SignedLogAccumulator::add(double log_abs, bool negative) {
  if (log_abs == -kInf) return;
  if (negative)
    log_neg_ = log_add_exp(log_neg_, log_abs);
  else
    log_pos_ = log_add_exp(log_pos_, log_abs);
}

double SignedLogAccumulator::log_abs() const {
  if (log_pos_ == log_neg_) return -kInf;
  double hi = std::max(log_pos_, log_neg_);
  double lo = std::min(log_pos_, log_neg_);
  if (lo == -kInf) return hi;
  return hi + std::log1p(-std::exp(lo - hi));
}

int SignedLogAccumulator::sign() const {
  if (log_pos_ > log_neg_) return 1;
  if (log_neg_ > log_pos_) return -1;
  return 0;
}

double SignedLogAccumulator::value() const {
  int s = sign();
  if (s == 0) return 0.0;
  return s * std::exp(log_abs());
}

}  // namespace fdrlab
