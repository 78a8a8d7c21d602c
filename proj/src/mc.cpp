#include "fdrlab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdrlab/criticality.hpp"
#include "fdrlab/excursion.hpp"
#include "fdrlab/procedures.hpp"

namespace fdrlab {

namespace {

int effective_threads(int requested) {
#ifdef _OPENMP
  if (requested > 0) return requested;
  return omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// One run's sorted sample plus the true-null prefix counts.
struct SortedRun {
  std::vector<double> p;                 // ascending
  std::vector<std::uint32_t> true_null_prefix;  // #theta=0 among first i
  std::size_t n_false = 0;
};

SortedRun make_sorted_run(const RandomEffectsModel& model, std::size_t n, std::uint64_t seed,
                          std::uint64_t run_index) {
  Engine eng = make_engine(seed, run_index);
  PValueSample s = sample_pvalues(model, n, eng);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.p[a] < s.p[b]; });
  SortedRun run;
  run.p.resize(n);
  run.true_null_prefix.resize(n + 1);
  run.true_null_prefix[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    run.p[i] = s.p[order[i]];
    run.true_null_prefix[i + 1] =
        run.true_null_prefix[i] + (s.is_false_null[order[i]] ? 0u : 1u);
  }
  run.n_false = n - run.true_null_prefix[n];
  return run;
}

struct ProcOutcome {
  std::size_t r = 0, v = 0;
  std::vector<std::pair<double, double>> intervals;  // rejected value ranges
};

// Applies every configured procedure to one sorted run; reference-point
// rejections are computed once and shared across the M variants.
std::vector<ProcOutcome> apply_procedures(const ExperimentConfig& cfg, const SortedRun& run,
                                          bool keep_intervals) {
  std::vector<ProcOutcome> out(cfg.procedures.size());
  const std::size_t n = run.p.size();
  std::vector<RefPointRejection> per_point;
  bool have_points = false;
  for (std::size_t pi = 0; pi < cfg.procedures.size(); ++pi) {
    const auto& proc = cfg.procedures[pi];
    ProcOutcome& o = out[pi];
    if (proc.kind == ProcedureSpec::Kind::BH) {
      o.r = bh_rejection_count(run.p, cfg.alpha);
      o.v = run.true_null_prefix[o.r];
      if (keep_intervals && o.r > 0) o.intervals.emplace_back(0.0, run.p[o.r - 1]);
      continue;
    }
    if (!have_points) {
      per_point.reserve(cfg.refpoints.size());
      for (double t : cfg.refpoints) per_point.push_back(ref_point_reject(run.p, t, cfg.alpha));
      have_points = true;
    }
    const double threshold = min_rejection_threshold(n, proc.c_exponent);
    for (std::size_t idx : select_points(per_point, threshold)) {
      const auto& rp = per_point[idx];
      o.r += rp.count();
      o.v += run.true_null_prefix[rp.U] - run.true_null_prefix[rp.L - 1];
      if (keep_intervals) o.intervals.emplace_back(run.p[rp.L - 1], run.p[rp.U - 1]);
    }
  }
  return out;
}

struct RunRecord {
  std::vector<std::size_t> r, v;
  std::vector<double> power;
  std::vector<std::vector<std::uint8_t>> covered;  // per procedure, per grid point
};

RunRecord simulate_one_run(const ExperimentConfig& cfg, std::uint64_t run_index,
                           bool with_cover) {
  SortedRun run = make_sorted_run(cfg.model, cfg.n, cfg.seed, run_index);
  std::vector<ProcOutcome> outcomes = apply_procedures(cfg, run, with_cover);
  RunRecord rec;
  rec.r.resize(outcomes.size());
  rec.v.resize(outcomes.size());
  rec.power.resize(outcomes.size());
  if (with_cover) rec.covered.resize(outcomes.size());
  for (std::size_t pi = 0; pi < outcomes.size(); ++pi) {
    rec.r[pi] = outcomes[pi].r;
    rec.v[pi] = outcomes[pi].v;
    rec.power[pi] = static_cast<double>(outcomes[pi].r - outcomes[pi].v) /
                    static_cast<double>(std::max<std::size_t>(run.n_false, 1));
    if (with_cover) {
      auto& bits = rec.covered[pi];
      bits.resize(cfg.cover_grid.size(), 0);
      for (std::size_t g = 0; g < cfg.cover_grid.size(); ++g) {
        double t = cfg.cover_grid[g];
        for (const auto& iv : outcomes[pi].intervals) {
          if (t >= iv.first && t <= iv.second) {
            bits[g] = 1;
            break;
          }
        }
      }
    }
  }
  return rec;
}

McEstimates aggregate(const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                      bool with_cover, const PValueLaw* law) {
  McEstimates est;
  est.seed = cfg.seed;
  est.n = cfg.n;
  est.runs = cfg.runs;
  est.alpha = cfg.alpha;
  est.procedures.resize(cfg.procedures.size());
  for (std::size_t pi = 0; pi < cfg.procedures.size(); ++pi) {
    ProcedureEstimates& pe = est.procedures[pi];
    pe.procedure = cfg.procedures[pi].name();
    double fdp_sum = 0.0, pfdr_sum = 0.0, power_sum = 0.0;
    std::size_t max_r = 0;
    for (const auto& rec : records) {
      std::size_t r = rec.r[pi], v = rec.v[pi];
      pe.rejections.push_back(r);
      pe.false_rejections.push_back(v);
      pe.power.push_back(rec.power[pi]);
      max_r = std::max(max_r, r);
      double fdp = r > 0 ? static_cast<double>(v) / static_cast<double>(r) : 0.0;
      fdp_sum += fdp;
      power_sum += rec.power[pi];
      if (r > 0) {
        ++pe.n_positive;
        pfdr_sum += fdp;
      }
    }
    const double nr = static_cast<double>(cfg.runs);
    pe.fdr_hat = fdp_sum / nr;
    pe.pfdr_hat = pe.n_positive > 0 ? pfdr_sum / static_cast<double>(pe.n_positive)
                                    : std::numeric_limits<double>::quiet_NaN();
    pe.power_hat = power_sum / nr;
    pe.pmf_hat.assign(max_r + 1, 0.0);
    for (std::size_t r : pe.rejections) pe.pmf_hat[r] += 1.0 / nr;
  }
  if (with_cover) {
    CoverBlock cover;
    cover.grid = cfg.cover_grid;
    cover.fprime.reserve(cover.grid.size());
    for (double t : cover.grid) cover.fprime.push_back(law ? law->fprime(t) : 0.0);
    for (std::size_t pi = 0; pi < cfg.procedures.size(); ++pi) {
      std::vector<double> curve(cover.grid.size(), 0.0);
      for (const auto& rec : records)
        for (std::size_t g = 0; g < curve.size(); ++g) curve[g] += rec.covered[pi][g];
      for (auto& x : curve) x /= static_cast<double>(cfg.runs);
      cover.p_cover.emplace_back(cfg.procedures[pi].column_tag(), std::move(curve));
    }
    est.cover = std::move(cover);
  }
  return est;
}

template <class RunFn>
void run_loop(std::size_t runs, int threads, bool parallel, RunFn&& fn) {
  if (!parallel || effective_threads(threads) == 1) {
    for (std::size_t j = 0; j < runs; ++j) fn(j);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_threads(threads))
  for (long j = 0; j < static_cast<long>(runs); ++j) fn(static_cast<std::size_t>(j));
#else
  for (std::size_t j = 0; j < runs; ++j) fn(j);
#endif
}

McEstimates run_experiment_impl(const ExperimentConfig& cfg, bool parallel) {
  validate(cfg);
  const bool with_cover = !cfg.cover_grid.empty();
  std::optional<PValueLaw> law;
  if (with_cover) law = law_of(cfg.model);
  std::vector<RunRecord> records(cfg.runs);
  run_loop(cfg.runs, cfg.threads, parallel,
           [&](std::size_t j) { records[j] = simulate_one_run(cfg, j, with_cover); });
  return aggregate(cfg, records, with_cover, law ? &*law : nullptr);
}

struct LilRun {
  std::vector<double> l;  // trajectory over the schedule
  double max_abs = 0.0;
};

LilRun simulate_lil_run(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes,
                        double p_star, std::uint64_t run_index) {
  Engine eng = make_engine(cfg.seed, run_index);
  PValueSample s = sample_pvalues(cfg.model, sizes.back(), eng);
  LilRun out;
  out.l.reserve(sizes.size());
  std::vector<double> sorted;
  sorted.reserve(sizes.back());
  std::size_t consumed = 0;
  for (std::size_t nk : sizes) {
    // grow the sorted prefix incrementally: sort the new block, then merge
    std::size_t old = sorted.size();
    sorted.insert(sorted.end(), s.p.begin() + consumed, s.p.begin() + nk);
    std::sort(sorted.begin() + old, sorted.end());
    std::inplace_merge(sorted.begin(), sorted.begin() + old, sorted.end());
    consumed = nk;
    std::size_t r = bh_rejection_count(sorted, cfg.alpha);
    double nd = static_cast<double>(nk);
    double l = (static_cast<double>(r) - nd * p_star) / std::sqrt(nd * std::log(std::log(nd)));
    out.l.push_back(l);
    out.max_abs = std::max(out.max_abs, std::abs(l));
  }
  return out;
}

McEstimates run_lil_experiment_impl(const ExperimentConfig& cfg, bool parallel) {
  validate(cfg);
  if (!cfg.lil) throw std::invalid_argument("lil experiment: schedule missing");
  PValueLaw law = law_of(cfg.model);
  const double astar = alpha_star(law);
  if (!(cfg.alpha > astar))
    throw std::domain_error("lil experiment: requires alpha > alpha_star");
  LilConstants consts = lil_lambda(law, cfg.alpha);
  if (consts.tangent) throw std::domain_error("lil experiment: tangent configuration");

  LilBlock block;
  block.alpha_star = astar;
  block.p_star = consts.p_star;
  block.fprime_u_star = consts.fprime_u_star;
  block.lambda = consts.lambda;
  block.sizes = cfg.lil->sizes();
  block.max_abs_l.resize(cfg.runs);
  block.trajectories.resize(cfg.runs);

  std::vector<LilRun> runs(cfg.runs);
  run_loop(cfg.runs, cfg.threads, parallel, [&](std::size_t j) {
    runs[j] = simulate_lil_run(cfg, block.sizes, block.p_star, j);
  });
  for (std::size_t j = 0; j < cfg.runs; ++j) {
    block.max_abs_l[j] = runs[j].max_abs;
    block.trajectories[j] = std::move(runs[j].l);
  }
  const double thresholds[4] = {1.0, 1.1, 1.2, 1.5};
  for (int i = 0; i < 4; ++i) {
    std::size_t above = 0;
    for (double m : block.max_abs_l)
      if (m > thresholds[i] * block.lambda) ++above;
    block.q_hat[i] = {thresholds[i], static_cast<double>(above) / static_cast<double>(cfg.runs)};
  }

  McEstimates est;
  est.seed = cfg.seed;
  est.n = block.sizes.back();
  est.runs = cfg.runs;
  est.alpha = cfg.alpha;
  est.lil = std::move(block);
  return est;
}

}  // namespace

std::string ProcedureSpec::name() const {
  if (kind == Kind::BH) return "BH";
  char buf[32];
  std::snprintf(buf, sizeof buf, "M(%g)", c_exponent);
  return buf;
}

std::string ProcedureSpec::column_tag() const {
  std::string tag = name();
  std::string out;
  for (char ch : tag)
    if (ch != '(' && ch != ')' && ch != '.') out.push_back(ch);
  return out;
}

std::vector<std::size_t> LilSchedule::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(count + 1);
  for (std::size_t k = 0; k <= count; ++k) {
    double v = base + step * static_cast<double>(k);
    out.push_back(static_cast<std::size_t>(std::floor(v * v)));
  }
  return out;
}

std::size_t LilSchedule::sample_size() const { return sizes().back(); }

void validate(const ExperimentConfig& cfg) {
  validate(cfg.model);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw std::invalid_argument("experiment: alpha must be in (0, 1)");
  if (cfg.n < 1 || cfg.runs < 1)
    throw std::invalid_argument("experiment: n and runs must be >= 1");
  if (cfg.procedures.empty() && !cfg.lil)
    throw std::invalid_argument("experiment: no procedures configured");
  bool any_m = false;
  for (const auto& p : cfg.procedures) any_m |= p.kind == ProcedureSpec::Kind::M;
  if (any_m) {
    if (cfg.refpoints.size() < 2 || cfg.refpoints.front() != 0.0 || cfg.refpoints.back() != 1.0)
      throw std::invalid_argument("experiment: M variants need reference points covering [0, 1]");
  }
  if (cfg.lil && cfg.lil->count < 1)
    throw std::invalid_argument("experiment: lil schedule needs at least two sizes");
}

McEstimates run_experiment(const ExperimentConfig& cfg) {
  return run_experiment_impl(cfg, /*parallel=*/true);
}

McEstimates run_experiment_serial(const ExperimentConfig& cfg) {
  return run_experiment_impl(cfg, /*parallel=*/false);
}

McEstimates run_lil_experiment(const ExperimentConfig& cfg) {
  return run_lil_experiment_impl(cfg, /*parallel=*/true);
}

McEstimates run_lil_experiment_serial(const ExperimentConfig& cfg) {
  return run_lil_experiment_impl(cfg, /*parallel=*/false);
}

McEstimates run_cover_experiment(const ExperimentConfig& cfg) {
  if (cfg.cover_grid.empty())
    throw std::invalid_argument("cover experiment: cover grid missing");
  return run_experiment_impl(cfg, /*parallel=*/true);
}

McEstimates run_cover_experiment_serial(const ExperimentConfig& cfg) {
  if (cfg.cover_grid.empty())
    throw std::invalid_argument("cover experiment: cover grid missing");
  return run_experiment_impl(cfg, /*parallel=*/false);
}

void attach_reference_distances(McEstimates& est, std::span<const double> reference_pmf) {
  for (auto& pe : est.procedures) {
    const std::size_t k = pe.pmf_hat.size();  // truncate both at max observed R
    std::vector<double> ref(reference_pmf.begin(),
                            reference_pmf.begin() +
                                std::min<std::size_t>(k, reference_pmf.size()));
    ref.resize(k, 0.0);
    Divergence kl = kl_divergence(pe.pmf_hat, ref);
    pe.kl_to_reference = kl.value;
    pe.kl_finite = kl.finite;
    pe.tv_to_reference = tv_distance(pe.pmf_hat, ref);
  }
}

std::size_t count_local_maxima(std::span<const double> curve, double prominence) {
  const std::size_t n = curve.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // plateau-aware local maximum: strictly higher than the nearest
    // differing neighbours on both sides
    std::size_t l = i;
    while (l > 0 && curve[l - 1] == curve[i]) --l;
    std::size_t r = i;
    while (r + 1 < n && curve[r + 1] == curve[i]) ++r;
    if (r > i) continue;  // count each plateau once, at its right edge
    bool left_ok = (l == 0) || curve[l - 1] < curve[i];
    bool right_ok = (r + 1 == n) || curve[r + 1] < curve[i];
    if (!(left_ok && right_ok)) continue;
    if (l == 0 || r + 1 == n) continue;  // endpoints are not peaks
    // prominence: drop to the highest valley floor before a higher point
    double left_min = curve[i], right_min = curve[i];
    for (std::size_t j = l; j-- > 0;) {
      left_min = std::min(left_min, curve[j]);
      if (curve[j] > curve[i]) break;
    }
    for (std::size_t j = r + 1; j < n; ++j) {
      right_min = std::min(right_min, curve[j]);
      if (curve[j] > curve[i]) break;
    }
    if (curve[i] - std::max(left_min, right_min) >= prominence) ++count;
  }
  return count;
}

}  // namespace fdrlab
