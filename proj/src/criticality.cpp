#include "fdrlab/criticality.hpp"

#include "fdrlab/detail/interval_dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdrlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.61803398874989484820;

template <class F>
double golden_minimize(F&& f, double a, double b, int iters = 90) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-14; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

std::vector<double> search_grid(const PValueLaw& law) {
  // Quadrature-backed laws are concave in all supported cases, so the grid
  // search is only a fallback there; keep it coarse.
  return law.quadrature_backed() ? law_grid(512, 60) : law_grid();
}

// Detects iterates pinned at the resolution of the quadrature-backed law.
struct StallGuard {
  double best = kInf;
  std::size_t since_improvement = 0;
  bool stalled(double diff) {
    if (diff < best) {
      best = diff;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    return diff < 1e-9 && since_improvement > 100;
  }
};

}  // namespace

double alpha_star_generic(const PValueLaw& law) {
  const double f0 = law.fprime_at_zero();
  if (f0 == kInf) return 0.0;
  double best = std::min(1.0, 1.0 / f0);  // u -> 0+ and u = 1 boundary candidates
  auto ratio = [&](double u) { return u / law.F(u); };
  const std::vector<double> grid = search_grid(law);
  double best_u = 0.0;
  for (double u : grid) {
    if (u <= 0.0 || u > 1.0) continue;
    double r = ratio(u);
    if (r < best) {
      best = r;
      best_u = u;
    }
  }
  if (best_u > 0.0) {
    auto it = std::lower_bound(grid.begin(), grid.end(), best_u);
    double lo = it == grid.begin() ? best_u / 2 : *(it - 1);
    double hi = (it + 1) == grid.end() ? 1.0 : *(it + 1);
    double u = golden_minimize(ratio, std::max(lo, 1e-300), hi);
    best = std::min(best, ratio(u));
  }
  return best;
}

double alpha_star(const PValueLaw& law) {
  if (law.concave()) {
    const double f0 = law.fprime_at_zero();
    return f0 == kInf ? 0.0 : std::min(1.0, 1.0 / f0);
  }
  return alpha_star_generic(law);
}

FixedPointResult u_star(const PValueLaw& law, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("u_star: alpha must be in (0, 1)");
  FixedPointResult out;
  const std::size_t max_iters = 1000000;
  double u = 1.0;
  StallGuard guard;
  for (out.iterations = 0; out.iterations < max_iters; ++out.iterations) {
    double next = alpha * law.F(u);
    double diff = std::abs(next - u);
    u = next;
    if (diff < 1e-13) {
      out.converged = true;
      break;
    }
    if (law.concave() && u < 1e-12) {
      // below the transversal crossing a concave F has no fixed point but 0
      u = 0.0;
      out.converged = true;
      break;
    }
    if (guard.stalled(diff)) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    // Tangency makes the iteration sublinear; look for a transversal
    // crossing just below the iterate and bisect on alpha F(u) - u.
    double hi = u, lo = -1.0;
    for (double step = 1e-12; step < 1.0; step *= 4.0) {
      double cand = hi - step;
      if (cand <= 0.0) break;
      if (alpha * law.F(cand) - cand > 0.0) {
        lo = cand;
        break;
      }
    }
    if (lo > 0.0) {
      for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        double mid = 0.5 * (lo + hi);
        (alpha * law.F(mid) - mid >= 0.0 ? lo : hi) = mid;
      }
      u = lo;
      out.converged = true;
    }
  }
  out.u_star = u;
  out.p_star = u > 0.0 ? law.F(u) : 0.0;
  return out;
}

double lil_lambda_value(double p_star, double fprime_u_star, double alpha) {
  return std::sqrt(2.0 * p_star * (1.0 - p_star)) / (1.0 - alpha * fprime_u_star);
}

LilConstants lil_lambda(const PValueLaw& law, double alpha) {
  const double astar = alpha_star(law);
  if (!(alpha > astar))
    throw std::domain_error("lil_lambda: requires alpha > alpha_star (fluctuation constants undefined)");
  FixedPointResult fp = u_star(law, alpha);
  LilConstants out;
  out.p_star = fp.p_star;
  out.fprime_u_star = law.fprime(fp.u_star);
  out.delta_gap = 1.0 - alpha * out.fprime_u_star;
  out.tangent = !(out.delta_gap > 0.0);
  if (!out.tangent) out.lambda = lil_lambda_value(fp.p_star, out.fprime_u_star, alpha);
  return out;
}

std::pair<double, double> u_t_pm(const PValueLaw& law, double alpha, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("u_t_pm: t must be in [0, 1]");
  const double Ft = law.F(t);
  double u_minus = t;
  {
    // inf{x in [0,t] : t - x <= alpha (F(t) - F(x))}: smallest fixed point of
    // g(x) = t - alpha (F(t) - F(x)), reached monotonically from x = 0.
    if (t - alpha * Ft <= 0.0) {
      u_minus = 0.0;
    } else {
      double x = 0.0;
      StallGuard guard;
      for (std::size_t i = 0; i < 100000; ++i) {
        double next = t - alpha * (Ft - law.F(x));
        double diff = std::abs(next - x);
        x = std::clamp(next, 0.0, t);
        if (diff < 1e-12 || guard.stalled(diff)) break;
      }
      u_minus = x;
    }
  }
  double u_plus = t;
  {
    // sup{x in [t,1] : x - t <= alpha (F(x) - F(t))}: largest fixed point of
    // h(x) = t + alpha (F(x) - F(t)), reached monotonically from x = 1.
    if (t + alpha * (1.0 - Ft) >= 1.0) {
      u_plus = 1.0;
    } else {
      double x = 1.0;
      StallGuard guard;
      for (std::size_t i = 0; i < 100000; ++i) {
        double next = t + alpha * (law.F(x) - Ft);
        double diff = std::abs(next - x);
        x = std::clamp(next, t, 1.0);
        if (diff < 1e-12 || guard.stalled(diff)) break;
      }
      u_plus = x;
    }
  }
  return {u_minus, u_plus};
}

double asymptotic_bh_power(const PValueLaw& law, double alpha) {
  FixedPointResult fp = u_star(law, alpha);
  if (!(fp.u_star > 0.0)) return 0.0;
  return law.G(fp.u_star);
}

ProcMPower asymptotic_procm_power(const PValueLaw& law, double alpha,
                                  const std::vector<double>& refpoints) {
  ProcMPower out;
  std::vector<double> gap(refpoints.size());
  for (std::size_t i = 0; i < refpoints.size(); ++i)
    gap[i] = refpoints[i] - alpha * law.F(refpoints[i]);
  for (std::size_t i = 0; i < refpoints.size(); ++i)
    for (std::size_t j = i + 1; j < refpoints.size(); ++j)
      if (std::abs(gap[i] - gap[j]) <= 1e-9)
        out.degenerate_pairs.emplace_back(refpoints[i], refpoints[j]);

  std::vector<detail::DpInterval> items;
  std::vector<std::pair<double, double>> bounds(refpoints.size());
  for (std::size_t i = 0; i < refpoints.size(); ++i) {
    auto [um, up] = u_t_pm(law, alpha, refpoints[i]);
    bounds[i] = {um, up};
    double mass = law.F(up) - law.F(um);
    // the endpoint iteration resolves to ~1e-12, so anything below
    // sup F' * 1e-12 is a degenerate interval, not rejectable mass
    if (mass > 1e-10) items.push_back({um, up, mass, i});
  }
  std::vector<std::size_t> sel = detail::max_weight_disjoint(std::move(items));
  for (std::size_t key : sel) {
    out.selected.push_back(refpoints[key]);
    out.intervals.push_back(bounds[key]);
    out.rejected_mass += law.F(bounds[key].second) - law.F(bounds[key].first);
  }
  const double pi = law.model().pi;
  out.power = ((1.0 - alpha) / pi + alpha) * out.rejected_mass;
  return out;
}

double nu0_exponent(long ell) {
  if (ell < 2) throw std::domain_error("nu0_exponent: ell must be >= 2");
  return (2.0 * ell - 2.0) / (2.0 * ell - 1.0);
}

double sup_fprime(const PValueLaw& law) {
  const double f0 = law.fprime_at_zero();
  const double f1 = law.fprime_at_one();
  if (f0 == kInf || f1 == kInf) return kInf;
  if (law.concave()) return f0;  // F' is nonincreasing
  double best = std::max(f0, f1);
  double best_u = -1.0;
  auto consider = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return;
    double v = law.fprime(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  };
  for (double u : search_grid(law)) consider(u);
  // Sharply peaked mixture densities: check the exact stationary points of
  // each component ratio, mapped back to the p-value scale.
  if (law.model().tail == TailRule::RightTail) {
    if (const auto* mix = std::get_if<GaussianMixtureSpec>(&law.model().alt_dist)) {
      for (const auto& c : mix->components) {
        if (c.sigma == 1.0) continue;
        double xstar = c.mu / (1.0 - c.sigma * c.sigma);
        consider(survival(law.model().null_dist, xstar));
      }
    }
  }
  if (best_u > 0.0) {
    double lo = std::max(0.0, best_u - 1e-3);
    double hi = std::min(1.0, best_u + 1e-3);
    double u = golden_minimize([&](double v) { return -law.fprime(v); }, lo, hi);
    best = std::max(best, law.fprime(u));
  }
  return best;
}

CriticalitySummary summarize_criticality(const PValueLaw& law, double alpha,
                                         std::optional<long> ell) {
  CriticalitySummary s;
  s.alpha = alpha;
  s.alpha_star = alpha_star(law);
  s.beta_star = (1.0 - law.model().pi) * s.alpha_star;
  s.sup_fprime = sup_fprime(law);
  FixedPointResult fp = u_star(law, alpha);
  s.u_star = fp.u_star;
  s.p_star = fp.p_star;
  s.q_star = 1.0 - fp.p_star;
  s.u_star_converged = fp.converged;
  double fu = law.fprime(fp.u_star);
  s.delta_gap = 1.0 - alpha * fu;
  s.tangent = fp.u_star > 0.0 && !(s.delta_gap > 0.0);
  if (alpha > s.alpha_star && s.delta_gap > 0.0) {
    s.fprime_u_star = fu;
    s.lil_lambda = lil_lambda_value(fp.p_star, fu, alpha);
  }
  if (ell) s.nu0 = nu0_exponent(*ell);
  return s;
}

}  // namespace fdrlab
