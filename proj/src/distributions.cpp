#include "fdrlab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdrlab/quadrature.hpp"
#include "fdrlab/special.hpp"

namespace fdrlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
constexpr double kCdfTol = 1e-10;
constexpr std::size_t kMaxSeriesTerms = 100000;

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

// --- series kernels -------------------------------------------------------

// log | sum_k Gamma((nu+k+1)/2) q^k / (k! Gamma((nu+1)/2)) |, sign in *sign.
// Split into even/odd k streams so each stream advances by exact factor
// recurrences; terms alternate in sign when q < 0.
double log_t_ratio_series(double nu, double q, int* sign_out) {
  SignedLogAccumulator acc;
  acc.add(0.0);  // k = 0 term is 1 in these units
  if (q != 0.0) {
    const double log_q2 = 2.0 * std::log(std::abs(q));
    const bool q_neg = q < 0.0;
    double log_even = 0.0;
    double log_odd = log_gamma((nu + 2.0) / 2.0) - log_gamma((nu + 1.0) / 2.0) +
                     std::log(std::abs(q));
    acc.add(log_odd, q_neg);
    double max_term = std::max(log_even, log_odd);
    double prev = max_term;
    for (std::size_t m = 0; m < kMaxSeriesTerms; ++m) {
      const double md = static_cast<double>(m);
      log_even += std::log((nu + 1.0) / 2.0 + md) + log_q2 -
                  std::log((2.0 * md + 1.0) * (2.0 * md + 2.0));
      log_odd += std::log((nu + 2.0) / 2.0 + md) + log_q2 -
                 std::log((2.0 * md + 2.0) * (2.0 * md + 3.0));
      acc.add(log_even, false);        // even powers of q are positive
      acc.add(log_odd, q_neg);         // odd powers carry the sign of q
      const double cur = std::max(log_even, log_odd);
      max_term = std::max(max_term, cur);
      if (cur < prev && (cur <= acc.log_abs() - 36.0 || cur <= max_term - 60.0)) break;
      prev = cur;
    }
  }
  if (sign_out) *sign_out = acc.sign();
  return acc.log_abs();
}

// log sum_k (delta/2)^k y^k B(p/2, nu/2) / (k! B(p/2+k, nu/2)); all terms
// positive, y in [0, 1].
double log_f_ratio_series(double p, double nu, double delta, double y) {
  double log_term = 0.0;
  double log_sum = 0.0;
  if (delta > 0.0 && y > 0.0) {
    const double log_base = std::log(0.5 * delta * y);
    for (std::size_t k = 0; k < kMaxSeriesTerms; ++k) {
      const double kd = static_cast<double>(k);
      log_term += log_base + std::log((p + nu) / 2.0 + kd) -
                  std::log((p / 2.0 + kd) * (kd + 1.0));
      double next = log_add_exp(log_sum, log_term);
      log_sum = next;
      if (log_term <= log_sum - 36.0 && kd + 1.0 > 0.5 * delta * y) break;
    }
  }
  return log_sum;
}

// rho(x) for the t pair in log space: rho = exp(-delta^2/2) * series(q),
// q = sqrt(2) delta x / sqrt(nu + x^2).
double log_t_likelihood_ratio(double nu, double delta, double x, int* sign_out) {
  const double q = 1.4142135623730950488 * delta * x / std::sqrt(nu + x * x);
  int sign = 1;
  double ls = log_t_ratio_series(nu, q, &sign);
  if (sign_out) *sign_out = sign;
  return -0.5 * delta * delta + ls;
}

double log_central_t_pdf(double nu, double x) {
  return log_gamma((nu + 1.0) / 2.0) - log_gamma(nu / 2.0) - 0.5 * std::log(nu * kPi) -
         0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double log_central_f_pdf(double p, double nu, double x) {
  const double theta = p / nu;
  return 0.5 * p * std::log(theta) + (0.5 * p - 1.0) * std::log(x) -
         0.5 * (p + nu) * std::log1p(theta * x) - log_beta(p / 2.0, nu / 2.0);
}

double log_mixture_pdf(const GaussianMixtureSpec& mix, double x) {
  double acc = -kInf;
  for (const auto& c : mix.components) {
    double z = (x - c.mu) / c.sigma;
    acc = log_add_exp(acc, std::log(c.weight) - std::log(c.sigma) + log_normal_pdf(z));
  }
  return acc;
}

double mixture_rho(const GaussianMixtureSpec& mix, double x) {
  // psi1(x)/psi0(x) against the standard normal null, in log space.
  double acc = -kInf;
  for (const auto& c : mix.components) {
    double expo = (c.sigma * c.sigma * x * x - (x - c.mu) * (x - c.mu)) /
                  (2.0 * c.sigma * c.sigma);
    acc = log_add_exp(acc, std::log(c.weight) - std::log(c.sigma) + expo);
  }
  return std::exp(acc);
}

// Table of limits of each mixture component ratio as x -> +inf.
double mixture_rho_limit(const GaussianMixtureSpec& mix, bool lower) {
  double finite_part = 0.0;
  for (const auto& c : mix.components) {
    const double mu = lower ? -c.mu : c.mu;
    if (c.sigma > 1.0) return kInf;
    if (c.sigma == 1.0) {
      if (mu > 0.0) return kInf;
      if (mu == 0.0) finite_part += c.weight;  // ratio tends to 1, weight w/sigma = w
    }
    // sigma < 1, or sigma == 1 with mu < 0: component ratio tends to 0
  }
  return finite_part;
}

struct MonotoneSolveSpec {
  double lo, hi;       // bracket with f(lo) < target < f(hi)
  double x0;           // initial guess
  double f_tol;        // |f(x) - target| acceptance
};

// Safeguarded Newton / bisection for an increasing function.
template <class F, class DF>
double solve_increasing(F&& f, DF&& df, double target, MonotoneSolveSpec s) {
  double lo = s.lo, hi = s.hi;
  double x = std::clamp(s.x0, lo, hi);
  double best_x = x, best_err = kInf;
  for (int iter = 0; iter < 200; ++iter) {
    double r = f(x) - target;
    if (std::abs(r) < best_err) {
      best_err = std::abs(r);
      best_x = x;
    }
    if (std::abs(r) <= s.f_tol) return x;
    if (r > 0.0)
      hi = x;
    else
      lo = x;
    double slope = df(x);
    double cand = (slope > 0.0) ? x - r / slope : lo;
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * (std::abs(lo) + std::abs(hi) + 1.0)) return best_x;
    x = cand;
  }
  return best_x;
}

double nct_cdf(const NoncentralTSpec& d, double x);
double ncf_cdf(const NoncentralFSpec& d, double x);

double expand_bracket_quantile(const DistributionSpec& spec, double q, double x0) {
  // Generic bracketing + safeguarded Newton for the quadrature-backed families.
  double lo = x0 - 1.0, hi = x0 + 1.0;
  double step = 1.0;
  while (cdf(spec, lo) >= q) {
    step *= 2.0;
    lo -= step;
    if (step > 1e12) break;
  }
  step = 1.0;
  while (cdf(spec, hi) <= q) {
    step *= 2.0;
    hi += step;
    if (step > 1e12) break;
  }
  return solve_increasing([&](double t) { return cdf(spec, t); },
                          [&](double t) { return pdf(spec, t); }, q,
                          {lo, hi, x0, 1e-11});
}

double nct_cdf(const NoncentralTSpec& d, double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  // P(T <= 0) = Phi(-delta) exactly; integrate the density from the anchor.
  double base = normal_cdf(-d.delta);
  if (x == 0.0) return base;
  auto f = [&](double t) { return pdf(DistributionSpec{d}, t); };
  double v;
  if (x > 0.0)
    v = base + integrate(f, 0.0, x, kCdfTol).value;
  else
    v = base - integrate(f, x, 0.0, kCdfTol).value;
  return std::clamp(v, 0.0, 1.0);
}

double ncf_cdf(const NoncentralFSpec& d, double x) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  auto f = [&](double t) { return pdf(DistributionSpec{d}, t); };
  double v = integrate(f, 0.0, x, kCdfTol).value;
  return std::clamp(v, 0.0, 1.0);
}

double sample_chi2(double df, Engine& rng) {
  return std::gamma_distribution<double>(0.5 * df, 2.0)(rng);
}

double sample_noncentral_chi2(double df, double delta, Engine& rng) {
  if (delta <= 0.0) return sample_chi2(df, rng);
  long k = std::poisson_distribution<long>(0.5 * delta)(rng);
  return sample_chi2(df + 2.0 * static_cast<double>(k), rng);
}

bool is_standard_normal(const DistributionSpec& spec) {
  const auto* n = std::get_if<NormalSpec>(&spec);
  return n && n->mu == 0.0 && n->sigma == 1.0;
}

}  // namespace

void validate(const DistributionSpec& spec) {
  std::visit(
      Overload{
          [](const NormalSpec& d) {
            if (!(d.sigma > 0.0) || !std::isfinite(d.sigma) || !std::isfinite(d.mu))
              throw std::invalid_argument("normal: sigma must be positive and finite");
          },
          [](const NoncentralTSpec& d) {
            if (!(d.nu > 0.0) || !std::isfinite(d.nu) || !std::isfinite(d.delta))
              throw std::invalid_argument("nct: nu must be positive, delta finite");
          },
          [](const NoncentralFSpec& d) {
            if (!(d.p > 0.0) || !(d.nu > 0.0) || !(d.delta >= 0.0) || !std::isfinite(d.delta))
              throw std::invalid_argument("ncf: p, nu must be positive, delta >= 0");
          },
          [](const GaussianMixtureSpec& d) {
            if (d.components.empty())
              throw std::invalid_argument("gauss_mix: needs at least one component");
            double wsum = 0.0;
            for (const auto& c : d.components) {
              if (!(c.weight > 0.0) || c.weight > 1.0)
                throw std::invalid_argument("gauss_mix: weights must lie in (0, 1]");
              if (!(c.sigma > 0.0) || !std::isfinite(c.sigma) || !std::isfinite(c.mu))
                throw std::invalid_argument("gauss_mix: sigma must be positive and finite");
              wsum += c.weight;
            }
            if (std::abs(wsum - 1.0) > 1e-12)
              throw std::invalid_argument("gauss_mix: weights must sum to 1 within 1e-12");
          },
          [](const CauchyScaleSpec& d) {
            if (!(d.s > 0.0) || !std::isfinite(d.s))
              throw std::invalid_argument("cauchy: scale must be positive and finite");
          }},
      spec);
}

double log_pdf(const DistributionSpec& spec, double x) {
  return std::visit(
      Overload{
          [&](const NormalSpec& d) {
            return log_normal_pdf((x - d.mu) / d.sigma) - std::log(d.sigma);
          },
          [&](const NoncentralTSpec& d) {
            if (d.delta == 0.0) return log_central_t_pdf(d.nu, x);
            int sign = 1;
            double lr = log_t_likelihood_ratio(d.nu, d.delta, x, &sign);
            if (sign <= 0) return -kInf;
            return log_central_t_pdf(d.nu, x) + lr;
          },
          [&](const NoncentralFSpec& d) {
            if (x < 0.0) return -kInf;
            if (x == 0.0) {
              if (d.p > 2.0) return -kInf;
              if (d.p == 2.0) return -0.5 * d.delta;  // theta * nu/2 = p/2 = 1
              return kInf;
            }
            double base = log_central_f_pdf(d.p, d.nu, x);
            if (d.delta == 0.0) return base;
            const double theta = d.p / d.nu;
            const double y = theta * x / (1.0 + theta * x);
            return base - 0.5 * d.delta + log_f_ratio_series(d.p, d.nu, d.delta, y);
          },
          [&](const GaussianMixtureSpec& d) { return log_mixture_pdf(d, x); },
          [&](const CauchyScaleSpec& d) {
            return -std::log(d.s * kPi) - std::log1p((x / d.s) * (x / d.s));
          }},
      spec);
}

double pdf(const DistributionSpec& spec, double x) { return std::exp(log_pdf(spec, x)); }

double cdf(const DistributionSpec& spec, double x) {
  return std::visit(
      Overload{
          [&](const NormalSpec& d) { return normal_cdf((x - d.mu) / d.sigma); },
          [&](const NoncentralTSpec& d) { return nct_cdf(d, x); },
          [&](const NoncentralFSpec& d) { return ncf_cdf(d, x); },
          [&](const GaussianMixtureSpec& d) {
            double acc = 0.0;
            for (const auto& c : d.components) acc += c.weight * normal_cdf((x - c.mu) / c.sigma);
            return acc;
          },
          [&](const CauchyScaleSpec& d) { return 0.5 + std::atan(x / d.s) / kPi; }},
      spec);
}

double survival(const DistributionSpec& spec, double x) {
  return std::visit(
      Overload{
          [&](const NormalSpec& d) { return normal_survival((x - d.mu) / d.sigma); },
          [&](const NoncentralTSpec& d) { return std::clamp(1.0 - nct_cdf(d, x), 0.0, 1.0); },
          [&](const NoncentralFSpec& d) { return std::clamp(1.0 - ncf_cdf(d, x), 0.0, 1.0); },
          [&](const GaussianMixtureSpec& d) {
            double acc = 0.0;
            for (const auto& c : d.components)
              acc += c.weight * normal_survival((x - c.mu) / c.sigma);
            return acc;
          },
          [&](const CauchyScaleSpec& d) {
            if (x > 0.0) return std::atan(d.s / x) / kPi;
            return 0.5 + std::atan(-x / d.s) / kPi;
          }},
      spec);
}

double quantile(const DistributionSpec& spec, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile: q must be in (0, 1)");
  return std::visit(
      Overload{
          [&](const NormalSpec& d) { return d.mu + d.sigma * normal_quantile(q); },
          [&](const NoncentralTSpec& d) {
            double x0 = d.delta + normal_quantile(q);
            return expand_bracket_quantile(spec, q, x0);
          },
          [&](const NoncentralFSpec& d) {
            double x0 = std::max(0.5, (1.0 + d.delta / d.p));
            double hi = x0, step = std::max(1.0, x0);
            while (ncf_cdf(d, hi) <= q && step < 1e12) {
              step *= 2.0;
              hi += step;
            }
            return solve_increasing([&](double t) { return ncf_cdf(d, t); },
                                    [&](double t) { return pdf(spec, t); }, q,
                                    {0.0, hi, std::min(x0, hi), 1e-11});
          },
          [&](const GaussianMixtureSpec& d) {
            double z = normal_quantile(q);
            double lo = kInf, hi = -kInf, mean = 0.0;
            for (const auto& c : d.components) {
              double xc = c.mu + c.sigma * z;
              lo = std::min(lo, xc);
              hi = std::max(hi, xc);
              mean += c.weight * xc;
            }
            if (lo == hi) return lo;
            return solve_increasing([&](double t) { return cdf(spec, t); },
                                    [&](double t) { return pdf(spec, t); }, q,
                                    {lo, hi, mean, 1e-13});
          },
          [&](const CauchyScaleSpec& d) { return d.s * std::tan(kPi * (q - 0.5)); }},
      spec);
}

double upper_quantile(const DistributionSpec& spec, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("upper_quantile: q must be in (0, 1)");
  return std::visit(
      Overload{
          [&](const NormalSpec& d) { return d.mu - d.sigma * normal_quantile(q); },
          [&](const NoncentralTSpec&) { return quantile(spec, 1.0 - q); },
          [&](const NoncentralFSpec&) { return quantile(spec, 1.0 - q); },
          [&](const GaussianMixtureSpec& d) {
            double z = normal_quantile(q);
            double lo = kInf, hi = -kInf, mean = 0.0;
            for (const auto& c : d.components) {
              double xc = c.mu - c.sigma * z;
              lo = std::min(lo, xc);
              hi = std::max(hi, xc);
              mean += c.weight * xc;
            }
            if (lo == hi) return lo;
            // survival is decreasing; q - survival is increasing in x.
            return solve_increasing([&](double t) { return q - survival(spec, t); },
                                    [&](double t) { return pdf(spec, t); }, 0.0,
                                    {lo, hi, mean, 1e-13 * std::max(q, 1e-3)});
          },
          [&](const CauchyScaleSpec& d) {
            if (q < 0.25) return d.s / std::tan(kPi * q);
            return d.s * std::tan(kPi * (0.5 - q));
          }},
      spec);
}

double sample(const DistributionSpec& spec, Engine& rng) {
  return std::visit(
      Overload{
          [&](const NormalSpec& d) {
            return d.mu + d.sigma * std::normal_distribution<double>{}(rng);
          },
          [&](const NoncentralTSpec& d) {
            double z = std::normal_distribution<double>{}(rng);
            double w = sample_chi2(d.nu, rng);
            return (z + d.delta) / std::sqrt(w / d.nu);
          },
          [&](const NoncentralFSpec& d) {
            double num = sample_noncentral_chi2(d.p, d.delta, rng) / d.p;
            double den = sample_chi2(d.nu, rng) / d.nu;
            return num / den;
          },
          [&](const GaussianMixtureSpec& d) {
            double u = std::uniform_real_distribution<double>{}(rng);
            double acc = 0.0;
            const MixtureComponent* pick = &d.components.back();
            for (const auto& c : d.components) {
              acc += c.weight;
              if (u <= acc) {
                pick = &c;
                break;
              }
            }
            return pick->mu + pick->sigma * std::normal_distribution<double>{}(rng);
          },
          [&](const CauchyScaleSpec& d) {
            double u = std::uniform_real_distribution<double>{}(rng);
            return d.s * std::tan(kPi * (u - 0.5));
          }},
      spec);
}

bool same_family_pair(const DistributionSpec& null_spec, const DistributionSpec& alt_spec) {
  if (const auto* t0 = std::get_if<NoncentralTSpec>(&null_spec)) {
    const auto* t1 = std::get_if<NoncentralTSpec>(&alt_spec);
    return t1 && t0->nu == t1->nu && t0->delta == 0.0;
  }
  if (const auto* f0 = std::get_if<NoncentralFSpec>(&null_spec)) {
    const auto* f1 = std::get_if<NoncentralFSpec>(&alt_spec);
    return f1 && f0->p == f1->p && f0->nu == f1->nu && f0->delta == 0.0;
  }
  if (std::holds_alternative<NormalSpec>(null_spec)) {
    return is_standard_normal(null_spec) &&
           (std::holds_alternative<NormalSpec>(alt_spec) ||
            std::holds_alternative<GaussianMixtureSpec>(alt_spec));
  }
  if (std::holds_alternative<CauchyScaleSpec>(null_spec))
    return std::holds_alternative<CauchyScaleSpec>(alt_spec);
  return false;
}

namespace {

GaussianMixtureSpec as_mixture(const DistributionSpec& alt_spec) {
  if (const auto* n = std::get_if<NormalSpec>(&alt_spec))
    return GaussianMixtureSpec{{MixtureComponent{1.0, n->mu, n->sigma}}};
  return std::get<GaussianMixtureSpec>(alt_spec);
}

[[noreturn]] void unsupported_pair() {
  throw std::domain_error("likelihood_ratio: unsupported distribution pair");
}

}  // namespace

double likelihood_ratio(const DistributionSpec& null_spec, const DistributionSpec& alt_spec,
                        double x) {
  if (!same_family_pair(null_spec, alt_spec)) unsupported_pair();
  if (const auto* t1 = std::get_if<NoncentralTSpec>(&alt_spec)) {
    if (t1->delta == 0.0) return 1.0;
    int sign = 1;
    double lr = log_t_likelihood_ratio(t1->nu, t1->delta, x, &sign);
    return sign <= 0 ? 0.0 : std::exp(lr);
  }
  if (const auto* f1 = std::get_if<NoncentralFSpec>(&alt_spec)) {
    if (f1->delta == 0.0) return 1.0;
    const double xc = std::max(x, 0.0);
    const double theta = f1->p / f1->nu;
    const double y = theta * xc / (1.0 + theta * xc);
    return std::exp(-0.5 * f1->delta + log_f_ratio_series(f1->p, f1->nu, f1->delta, y));
  }
  if (std::holds_alternative<CauchyScaleSpec>(null_spec)) {
    double s0 = std::get<CauchyScaleSpec>(null_spec).s;
    double s1 = std::get<CauchyScaleSpec>(alt_spec).s;
    return (s0 / s1) * (1.0 + (x / s0) * (x / s0)) / (1.0 + (x / s1) * (x / s1));
  }
  return mixture_rho(as_mixture(alt_spec), x);
}

double likelihood_ratio_limit(const DistributionSpec& null_spec,
                              const DistributionSpec& alt_spec) {
  if (!same_family_pair(null_spec, alt_spec)) unsupported_pair();
  if (const auto* t1 = std::get_if<NoncentralTSpec>(&alt_spec)) {
    if (t1->delta == 0.0) return 1.0;
    int sign = 1;
    double ls = log_t_ratio_series(t1->nu, 1.4142135623730950488 * t1->delta, &sign);
    return sign <= 0 ? 0.0 : std::exp(-0.5 * t1->delta * t1->delta + ls);
  }
  if (const auto* f1 = std::get_if<NoncentralFSpec>(&alt_spec)) {
    if (f1->delta == 0.0) return 1.0;
    return std::exp(-0.5 * f1->delta + log_f_ratio_series(f1->p, f1->nu, f1->delta, 1.0));
  }
  if (std::holds_alternative<CauchyScaleSpec>(null_spec)) {
    return std::get<CauchyScaleSpec>(alt_spec).s / std::get<CauchyScaleSpec>(null_spec).s;
  }
  return mixture_rho_limit(as_mixture(alt_spec), /*lower=*/false);
}

double likelihood_ratio_lower_limit(const DistributionSpec& null_spec,
                                    const DistributionSpec& alt_spec) {
  if (!same_family_pair(null_spec, alt_spec)) unsupported_pair();
  if (const auto* t1 = std::get_if<NoncentralTSpec>(&alt_spec)) {
    if (t1->delta == 0.0) return 1.0;
    int sign = 1;
    double ls = log_t_ratio_series(t1->nu, -1.4142135623730950488 * t1->delta, &sign);
    return sign <= 0 ? 0.0 : std::exp(-0.5 * t1->delta * t1->delta + ls);
  }
  if (const auto* f1 = std::get_if<NoncentralFSpec>(&alt_spec)) {
    return std::exp(-0.5 * f1->delta);  // series at y = 0
  }
  if (std::holds_alternative<CauchyScaleSpec>(null_spec)) {
    return std::get<CauchyScaleSpec>(alt_spec).s / std::get<CauchyScaleSpec>(null_spec).s;
  }
  return mixture_rho_limit(as_mixture(alt_spec), /*lower=*/true);
}

bool symmetric_about_zero(const DistributionSpec& spec) {
  return std::visit(
      Overload{[](const NormalSpec& d) { return d.mu == 0.0; },
               [](const NoncentralTSpec& d) { return d.delta == 0.0; },
               [](const NoncentralFSpec&) { return false; },
               [](const GaussianMixtureSpec& d) {
                 for (const auto& c : d.components)
                   if (c.mu != 0.0) return false;
                 return true;
               },
               [](const CauchyScaleSpec&) { return true; }},
      spec);
}

const char* family_name(const DistributionSpec& spec) {
  return std::visit(Overload{[](const NormalSpec&) { return "normal"; },
                             [](const NoncentralTSpec&) { return "nct"; },
                             [](const NoncentralFSpec&) { return "ncf"; },
                             [](const GaussianMixtureSpec&) { return "gauss_mix"; },
                             [](const CauchyScaleSpec&) { return "cauchy"; }},
                    spec);
}

}  // namespace fdrlab
