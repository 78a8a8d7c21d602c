#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdrlab/pvalue_law.hpp"

namespace fdrlab {

struct ProcedureSpec {
  enum class Kind { BH, M };
  Kind kind = Kind::BH;
  double c_exponent = 0.0;  // threshold exponent for M
  std::string name() const;
  std::string column_tag() const;  // "BH", "M0", "M15", ...
};

struct LilSchedule {
  double base = 200.0;
  double step = 0.2;
  std::size_t count = 600;  // k = 0 .. count
  std::vector<std::size_t> sizes() const;  // n_k = floor((base + step k)^2)
  std::size_t sample_size() const;         // n_count
};

struct ExperimentConfig {
  RandomEffectsModel model;
  double alpha = 0.1;
  std::size_t n = 1000;  // p-values per run
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::vector<ProcedureSpec> procedures;
  std::vector<double> refpoints;  // required when any M variant is present
  std::optional<LilSchedule> lil;
  std::vector<double> cover_grid;
  int threads = 0;  // 0 = all available
};

void validate(const ExperimentConfig& cfg);

struct ProcedureEstimates {
  std::string procedure;
  double fdr_hat = 0.0;
  double pfdr_hat = 0.0;  // NaN when no positive run
  double power_hat = 0.0;
  std::size_t n_positive = 0;
  std::vector<double> pmf_hat;  // empirical law of R over 0..max observed
  std::vector<std::size_t> rejections;        // per run
  std::vector<std::size_t> false_rejections;  // per run
  std::vector<double> power;                  // per run
  std::optional<double> kl_to_reference;      // vs a reference pmf, if attached
  std::optional<bool> kl_finite;
  std::optional<double> tv_to_reference;
};

struct LilBlock {
  double alpha_star = 0.0;
  double p_star = 0.0;
  double fprime_u_star = 0.0;
  double lambda = 0.0;
  std::vector<std::size_t> sizes;            // n_k
  std::vector<double> max_abs_l;             // per run
  std::array<std::pair<double, double>, 4> q_hat{};  // (t, share of runs above t*lambda)
  std::vector<std::vector<double>> trajectories;     // per run: L at each n_k
};

struct CoverBlock {
  std::vector<double> grid;
  std::vector<double> fprime;
  std::vector<std::pair<std::string, std::vector<double>>> p_cover;  // per procedure
};

struct McEstimates {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t runs = 0;
  double alpha = 0.0;
  std::vector<ProcedureEstimates> procedures;
  std::optional<LilBlock> lil;
  std::optional<CoverBlock> cover;
};

/// One run per (seed, run index) substream; embarrassingly parallel over
/// runs (OpenMP) with a deterministic ordered reduction, so results are
/// identical for any thread count.
McEstimates run_experiment(const ExperimentConfig& cfg);

/// Plain-loop reference implementation of the same computation; kept for
/// testing and benchmarked against the parallel driver.
McEstimates run_experiment_serial(const ExperimentConfig& cfg);

/// Prefix-BH fluctuation experiment: per run, applies the step-up rule to
/// the first n_k p-values and records L_{n_k} = (R_{n_k} - n_k p*) /
/// sqrt(n_k ln ln n_k). Requires alpha > alpha_star.
McEstimates run_lil_experiment(const ExperimentConfig& cfg);
McEstimates run_lil_experiment_serial(const ExperimentConfig& cfg);

/// Coverage curves: per grid point t, the share of runs whose rejection
/// region covers t, for BH and each configured M variant.
McEstimates run_cover_experiment(const ExperimentConfig& cfg);
McEstimates run_cover_experiment_serial(const ExperimentConfig& cfg);

/// Attaches KL and TV distances between each procedure's empirical rejection
/// pmf and a reference pmf, both truncated at the max observed count.
void attach_reference_distances(McEstimates& est, std::span<const double> reference_pmf);

/// Local maxima with at least the given prominence (drop to the surrounding
/// valleys before a higher point).
std::size_t count_local_maxima(std::span<const double> curve, double prominence);

}  // namespace fdrlab
