#pragma once

#include <variant>
#include <vector>

#include "fdrlab/rng.hpp"

namespace fdrlab {

struct NormalSpec {
  double mu = 0.0;
  double sigma = 1.0;
};

struct NoncentralTSpec {
  double nu = 1.0;     // degrees of freedom
  double delta = 0.0;  // noncentrality
};

struct NoncentralFSpec {
  double p = 1.0;      // numerator degrees of freedom
  double nu = 1.0;     // denominator degrees of freedom
  double delta = 0.0;  // noncentrality
};

struct MixtureComponent {
  double weight = 1.0;
  double mu = 0.0;
  double sigma = 1.0;  // standard deviation
};

struct GaussianMixtureSpec {
  std::vector<MixtureComponent> components;
};

struct CauchyScaleSpec {
  double s = 1.0;
};

using DistributionSpec = std::variant<NormalSpec, NoncentralTSpec, NoncentralFSpec,
                                      GaussianMixtureSpec, CauchyScaleSpec>;

/// Parameter sanity (positive scales and degrees of freedom, mixture weights
/// in (0, 1] summing to 1 within 1e-12). Throws std::invalid_argument.
void validate(const DistributionSpec& spec);

/// Density; 0 outside the support. Noncentral t/F densities are evaluated
/// through their series in log space.
double pdf(const DistributionSpec& spec, double x);
double log_pdf(const DistributionSpec& spec, double x);

/// CDF. Closed forms for normal / mixture / Cauchy; adaptive Gauss-Kronrod
/// quadrature of the series density (abs tol 1e-10) for noncentral t and F.
double cdf(const DistributionSpec& spec, double x);

/// 1 - CDF, with full relative precision in the upper tail for the
/// closed-form families.
double survival(const DistributionSpec& spec, double x);

/// Inverse CDF for q in (0, 1); |cdf(quantile(q)) - q| <= 1e-10.
/// Throws std::domain_error at q in {0, 1}.
double quantile(const DistributionSpec& spec, double q);

/// x such that survival(x) = q; tail-accurate counterpart of quantile(1 - q).
double upper_quantile(const DistributionSpec& spec, double q);

/// One draw. Noncentral t is sampled as (Z + delta)/sqrt(chi2_nu/nu),
/// noncentral F as (chi2_p(delta)/p)/(chi2_nu/nu), the mixture by component
/// selection, Cauchy by quantile transform.
double sample(const DistributionSpec& spec, Engine& rng);

/// rho(x) = alt density / null density for the supported test-statistic
/// pairs: central-vs-noncentral t (same nu), central-vs-noncentral F (same
/// p, nu), N(0,1) vs normal or Gaussian mixture, Cauchy vs Cauchy.
/// Throws std::domain_error for other pairs.
double likelihood_ratio(const DistributionSpec& null_spec, const DistributionSpec& alt_spec,
                        double x);

/// lim rho(x) as x tends to the top of the support (+inf); may be +inf.
double likelihood_ratio_limit(const DistributionSpec& null_spec,
                              const DistributionSpec& alt_spec);

/// lim rho(x) as x tends to the bottom of the support (-inf, or 0+ for F).
double likelihood_ratio_lower_limit(const DistributionSpec& null_spec,
                                    const DistributionSpec& alt_spec);

bool symmetric_about_zero(const DistributionSpec& spec);

bool same_family_pair(const DistributionSpec& null_spec, const DistributionSpec& alt_spec);

const char* family_name(const DistributionSpec& spec);

}  // namespace fdrlab
