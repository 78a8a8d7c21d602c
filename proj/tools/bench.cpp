// Compares the serial reference driver against the OpenMP one on a mid-size
// experiment and checks that they agree bit for bit.
#include <chrono>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "fdrlab/json_io.hpp"
#include "fdrlab/mc.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fdrlab::ExperimentConfig bench_config() {
  fdrlab::ExperimentConfig cfg;
  cfg.model.pi = 0.05;
  cfg.model.null_dist = fdrlab::NormalSpec{0.0, 1.0};
  fdrlab::GaussianMixtureSpec mix;
  mix.components = {{0.5, -1.3, 0.015}, {0.5, 1.0, 0.015}};
  cfg.model.alt_dist = mix;
  cfg.alpha = 0.3;
  cfg.n = 20000;
  cfg.runs = 200;
  cfg.seed = 20240611;
  cfg.procedures = {{fdrlab::ProcedureSpec::Kind::BH, 0.0},
                    {fdrlab::ProcedureSpec::Kind::M, 0.0},
                    {fdrlab::ProcedureSpec::Kind::M, 1.5},
                    {fdrlab::ProcedureSpec::Kind::M, 2.0}};
  for (int k = 0; k <= 100; ++k) cfg.refpoints.push_back(0.01 * k);
  cfg.refpoints.front() = 0.0;
  cfg.refpoints.back() = 1.0;
  return cfg;
}

}  // namespace

int main() {
  fdrlab::ExperimentConfig cfg = bench_config();

  auto t0 = Clock::now();
  fdrlab::McEstimates serial = fdrlab::run_experiment_serial(cfg);
  double serial_s = seconds_since(t0);
  std::printf("serial reference:   %7.2f s  (%zu runs of n=%zu, %zu procedures)\n", serial_s,
              cfg.runs, cfg.n, cfg.procedures.size());

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  for (int threads = 1; threads <= max_threads; threads *= 2) {
    cfg.threads = threads;
    t0 = Clock::now();
    fdrlab::McEstimates parallel = fdrlab::run_experiment(cfg);
    double par_s = seconds_since(t0);
    bool identical = fdrlab::to_json(parallel) == fdrlab::to_json(serial);
    std::printf("openmp %2d thread%s: %7.2f s  speedup %.2fx  %s\n", threads,
                threads == 1 ? " " : "s", par_s, serial_s / par_s,
                identical ? "matches serial" : "MISMATCH");
    if (!identical) return 1;
  }
  return 0;
}
