#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fdrlab {

struct RejectionResult {
  std::size_t n = 0;
  std::size_t n_false_null = 0;       // count of theta = 1 (0 when no truth given)
  std::size_t rejections = 0;         // R
  std::size_t false_rejections = 0;   // V (meaningful only with truth)
  std::vector<std::size_t> rejected;  // original indices, ties broken by index
  std::optional<double> threshold;    // largest rejected p-value
  double power = 0.0;                 // (R - V)/max(n_false_null, 1)
  double fdp = 0.0;                   // V/(R v 1)
};

/// Step-up rule: R = max{j >= 0 : p_(j) <= alpha j / n}; rejects the R
/// smallest p-values. Throws std::invalid_argument on p outside [0,1] or a
/// truth vector of mismatched length.
RejectionResult bh(std::span<const double> pvalues, double alpha,
                   std::span<const std::uint8_t> truth = {});

/// R on already-sorted p-values (ascending); the O(n) kernel behind bh().
std::size_t bh_rejection_count(std::span<const double> sorted_p, double alpha);

struct RefPointRejection {
  double t = 0.0;
  std::size_t r_plus = 0;   // forward rejections at t
  std::size_t r_minus = 0;  // backward rejections at t
  std::size_t L = 1;        // first rejected order statistic (1-based)
  std::size_t U = 0;        // last rejected order statistic; empty iff U < L
  double t_minus = 0.0;     // continuous stopping times bracketing the interval
  double t_plus = 0.0;
  double r_total = 0.0;     // r_plus + r_minus
  bool stopping_identity_ok = true;  // L = R_n^o(T-) + 1 and U = R_n(T+)
  bool empty() const { return U < L; }
  std::size_t count() const { return empty() ? 0 : U - L + 1; }
};

/// Forward and backward step-up rejections at reference point t on sorted
/// p-values, with the stopping-time cross-check.
RefPointRejection ref_point_reject(std::span<const double> sorted_p, double t, double alpha);

/// Keeps points with at least min_rejections rejections and picks the
/// disjoint-interval subset maximizing the total rejection count (dynamic
/// program over intervals relabeled by upper endpoint). Returns indices into
/// per_point.
std::vector<std::size_t> select_points(const std::vector<RefPointRejection>& per_point,
                                       double min_rejections);

struct ProcMResult {
  std::vector<RefPointRejection> per_point;
  std::vector<std::size_t> selected;  // indices into per_point
  std::vector<std::pair<double, double>> rejection_intervals;
  double min_rejections = 1.0;
  std::size_t n = 0;
  std::size_t n_false_null = 0;
  std::size_t rejections = 0;
  std::size_t false_rejections = 0;
  std::vector<std::size_t> rejected;  // original indices
  double power = 0.0;
  double fdp = 0.0;
};

/// Multi-reference-point procedure: step-up rejections at every reference
/// point, selection of a disjoint maximal subset (each selected point needs
/// (log n)^c rejections; at least one when c = 0), rejection of the union of
/// the selected order-statistic intervals.
ProcMResult proc_m(std::span<const double> pvalues, std::span<const double> refpoints,
                   double alpha, double c_exponent,
                   std::span<const std::uint8_t> truth = {});

/// Rejection threshold (log n)^c, natural log; 1 when c = 0.
double min_rejection_threshold(std::size_t n, double c_exponent);

}  // namespace fdrlab
