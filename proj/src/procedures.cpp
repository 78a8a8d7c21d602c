#include "fdrlab/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdrlab/detail/interval_dp.hpp"

namespace fdrlab {

namespace {

void check_pvalues(std::span<const double> pvalues) {
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("p-values must lie in [0, 1]");
}

std::vector<std::size_t> sort_order(std::span<const double> pvalues) {
  std::vector<std::size_t> order(pvalues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  return order;
}

}  // namespace

std::size_t bh_rejection_count(std::span<const double> sorted_p, double alpha) {
  const std::size_t n = sorted_p.size();
  for (std::size_t j = n; j >= 1; --j) {
    if (sorted_p[j - 1] <= alpha * static_cast<double>(j) / static_cast<double>(n)) return j;
  }
  return 0;
}

RejectionResult bh(std::span<const double> pvalues, double alpha,
                   std::span<const std::uint8_t> truth) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bh: alpha must be in (0, 1)");
  check_pvalues(pvalues);
  if (!truth.empty() && truth.size() != pvalues.size())
    throw std::invalid_argument("bh: truth length mismatch");

  RejectionResult out;
  out.n = pvalues.size();
  std::vector<std::size_t> order = sort_order(pvalues);
  std::vector<double> sorted(pvalues.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = pvalues[order[i]];

  const std::size_t r = bh_rejection_count(sorted, alpha);
  out.rejections = r;
  out.rejected.assign(order.begin(), order.begin() + r);
  if (r > 0) out.threshold = sorted[r - 1];
  if (!truth.empty()) {
    for (auto b : truth) out.n_false_null += b;
    for (std::size_t i = 0; i < r; ++i)
      if (!truth[order[i]]) ++out.false_rejections;
  }
  out.fdp = r > 0 ? static_cast<double>(out.false_rejections) / static_cast<double>(r) : 0.0;
  out.power = static_cast<double>(r - out.false_rejections) /
              static_cast<double>(std::max<std::size_t>(out.n_false_null, 1));
  return out;
}

RefPointRejection ref_point_reject(std::span<const double> sorted_p, double t, double alpha) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("ref_point_reject: t must be in [0, 1]");
  const std::size_t n = sorted_p.size();
  const double dn = static_cast<double>(n);

  // counts at t: R_n(t) = #{p <= t}, R_n^o(t) = #{p < t}
  const std::size_t r_at = static_cast<std::size_t>(
      std::upper_bound(sorted_p.begin(), sorted_p.end(), t) - sorted_p.begin());
  const std::size_t r_below = static_cast<std::size_t>(
      std::lower_bound(sorted_p.begin(), sorted_p.end(), t) - sorted_p.begin());

  RefPointRejection out;
  out.t = t;
  // forward: max{0 <= j <= n - R_n(t) : p_(R_n(t)+j) - t <= alpha j / n}
  for (std::size_t j = 1; j <= n - r_at; ++j) {
    if (sorted_p[r_at + j - 1] - t <= alpha * static_cast<double>(j) / dn) out.r_plus = j;
  }
  // backward: max{0 <= j <= R_n^o(t) : t - p_(R_n^o(t)-j+1) <= alpha j / n}
  for (std::size_t j = 1; j <= r_below; ++j) {
    if (t - sorted_p[r_below - j] <= alpha * static_cast<double>(j) / dn) out.r_minus = j;
  }
  out.L = r_below - out.r_minus + 1;
  out.U = r_at + out.r_plus;
  out.r_total = static_cast<double>(out.r_plus + out.r_minus);

  // Continuous stopping times; their rejection counts must reproduce L and U.
  out.t_minus = t - alpha * static_cast<double>(std::max<std::size_t>(out.r_minus, 1)) / dn;
  out.t_plus = t + alpha * static_cast<double>(std::max<std::size_t>(out.r_plus, 1)) / dn;
  const std::size_t below_tminus = static_cast<std::size_t>(
      std::lower_bound(sorted_p.begin(), sorted_p.end(), out.t_minus) - sorted_p.begin());
  const std::size_t at_tplus = static_cast<std::size_t>(
      std::upper_bound(sorted_p.begin(), sorted_p.end(), out.t_plus) - sorted_p.begin());
  out.stopping_identity_ok = (below_tminus + 1 == out.L) && (at_tplus == out.U);
  return out;
}

double min_rejection_threshold(std::size_t n, double c_exponent) {
  if (c_exponent < 0.0)
    throw std::invalid_argument("min_rejection_threshold: c must be >= 0");
  if (c_exponent == 0.0) return 1.0;
  return std::pow(std::log(static_cast<double>(n)), c_exponent);
}

std::vector<std::size_t> select_points(const std::vector<RefPointRejection>& per_point,
                                       double min_rejections) {
  std::vector<detail::DpInterval> items;
  for (std::size_t i = 0; i < per_point.size(); ++i) {
    const auto& rp = per_point[i];
    if (rp.empty() || rp.r_total < min_rejections) continue;
    items.push_back({static_cast<double>(rp.L), static_cast<double>(rp.U),
                     static_cast<double>(rp.count()), i});
  }
  return detail::max_weight_disjoint(std::move(items));
}

ProcMResult proc_m(std::span<const double> pvalues, std::span<const double> refpoints,
                   double alpha, double c_exponent, std::span<const std::uint8_t> truth) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("proc_m: alpha must be in (0, 1)");
  check_pvalues(pvalues);
  if (!truth.empty() && truth.size() != pvalues.size())
    throw std::invalid_argument("proc_m: truth length mismatch");
  if (refpoints.size() < 2 || refpoints.front() != 0.0 || refpoints.back() != 1.0)
    throw std::invalid_argument("proc_m: reference points must start at 0 and end at 1");
  for (std::size_t i = 1; i < refpoints.size(); ++i)
    if (!(refpoints[i] > refpoints[i - 1]))
      throw std::invalid_argument("proc_m: reference points must be strictly increasing");

  ProcMResult out;
  out.n = pvalues.size();
  std::vector<std::size_t> order = sort_order(pvalues);
  std::vector<double> sorted(out.n);
  for (std::size_t i = 0; i < out.n; ++i) sorted[i] = pvalues[order[i]];

  out.min_rejections = min_rejection_threshold(out.n, c_exponent);
  out.per_point.reserve(refpoints.size());
  for (double t : refpoints) out.per_point.push_back(ref_point_reject(sorted, t, alpha));
  out.selected = select_points(out.per_point, out.min_rejections);

  if (!truth.empty())
    for (auto b : truth) out.n_false_null += b;
  for (std::size_t idx : out.selected) {
    const auto& rp = out.per_point[idx];
    out.rejection_intervals.emplace_back(sorted[rp.L - 1], sorted[rp.U - 1]);
    out.rejections += rp.count();
    for (std::size_t j = rp.L; j <= rp.U; ++j) {
      out.rejected.push_back(order[j - 1]);
      if (!truth.empty() && !truth[order[j - 1]]) ++out.false_rejections;
    }
  }
  std::sort(out.rejected.begin(), out.rejected.end());
  out.fdp = out.rejections > 0
                ? static_cast<double>(out.false_rejections) / static_cast<double>(out.rejections)
                : 0.0;
  out.power = static_cast<double>(out.rejections - out.false_rejections) /
              static_cast<double>(std::max<std::size_t>(out.n_false_null, 1));
  return out;
}

}  // namespace fdrlab
