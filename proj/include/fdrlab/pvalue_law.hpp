#pragma once

#include <cstdint>
#include <vector>

#include "fdrlab/distributions.hpp"
#include "fdrlab/rng.hpp"

namespace fdrlab {

enum class TailRule { RightTail, TwoTail, LeftTail };

const char* tail_name(TailRule t);

/// Random effects model: each hypothesis is independently false with
/// probability pi; p-values are uniform under a true null and follow the law
/// induced by (null_dist, alt_dist, tail) under a false null.
struct RandomEffectsModel {
  double pi = 0.1;
  DistributionSpec null_dist;
  DistributionSpec alt_dist;
  TailRule tail = TailRule::RightTail;
};

/// Throws std::invalid_argument on bad parameters or an unsupported
/// (tail, distribution) combination.
void validate(const RandomEffectsModel& model);

/// The marginal p-value law of a random effects model:
///   F(u) = (1 - pi) u + pi G(u), with G the false-null branch, and
///   fprime(u) = F'(u) = 1 - pi + pi rho(x(u)).
/// TwoTail/LeftTail require a null distribution symmetric about 0; for
/// Cauchy scale pairs these evaluate through closed forms.
class PValueLaw {
 public:
  double F(double u) const;
  double G(double u) const;
  double fprime(double u) const;       // one-sided limits at u = 0 and u = 1
  double fprime_at_zero() const { return fprime0_; }
  double fprime_at_one() const { return fprime1_; }

  /// True when concavity of F is known: proved for right-tail t and F pairs,
  /// otherwise certified from second differences of a closed-form law.
  bool concave() const { return concave_; }

  /// True when F/G require quadrature (noncentral t or F family involved).
  bool quadrature_backed() const { return quadrature_backed_; }

  const RandomEffectsModel& model() const { return model_; }

 private:
  friend PValueLaw law_of(const RandomEffectsModel&);
  PValueLaw() = default;

  double rho_at(double x) const;

  RandomEffectsModel model_;
  double fprime0_ = 0.0;
  double fprime1_ = 0.0;
  bool concave_ = false;
  bool quadrature_backed_ = false;
  bool lr_pair_ = false;
};

PValueLaw law_of(const RandomEffectsModel& model);

/// Evaluation grid: 10^4 uniform points plus geometric refinement toward 0
/// and 1, where the criticality behaviour lives.
std::vector<double> law_grid(std::size_t uniform_points = 10000,
                             std::size_t geometric_per_side = 160,
                             double edge_exponent = 9.0);

struct PValueSample {
  std::vector<double> p;
  std::vector<std::uint8_t> is_false_null;  // theta
  std::size_t false_null_count() const;
};

/// n i.i.d. (p, theta) pairs: theta ~ Bernoulli(pi); p uniform when theta=0,
/// otherwise formed from X ~ alt_dist by the model's tail rule.
PValueSample sample_pvalues(const RandomEffectsModel& model, std::size_t n, Engine& rng);

}  // namespace fdrlab
