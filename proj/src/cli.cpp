#include "fdrlab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>

#include "fdrlab/criticality.hpp"
#include "fdrlab/json_io.hpp"
#include "fdrlab/report.hpp"

namespace fdrlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
  auto* copt = cmd->add_option("--config", o.config_path, "experiment manifest (JSON)");
  if (config_required) copt->required();
  cmd->add_option("--set", o.overrides, "config override key=value (dotted path)");
  cmd->add_option("--out-dir", o.out_dir, "directory for output files");
  cmd->add_option("--seed", o.seed, "master seed override");
  cmd->add_option("--threads", o.threads, "worker thread cap (FDRLAB_THREADS as fallback)");
}

int env_threads() {
  const char* v = std::getenv("FDRLAB_THREADS");
  if (!v) return 0;
  return std::atoi(v);
}

Manifest load(const CommonOpts& o) {
  Manifest m = load_manifest(o.config_path, o.overrides);
  if (o.seed) m.seed = *o.seed;
  if (o.threads)
    m.threads = *o.threads;
  else if (m.threads == 0)
    m.threads = env_threads();
  return m;
}

void apply_manifest_globals(const Manifest& m, ExperimentConfig& cfg) {
  cfg.seed = m.seed;
  cfg.threads = m.threads;
}

fs::path ensure_out_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p))
    throw ConfigError("out-dir \"" + p.string() + "\": not a writable directory");
  return p;
}

void write_outputs(const fs::path& dir, std::initializer_list<std::pair<const char*, std::string>> files) {
  for (const auto& [name, content] : files) write_text_atomic(dir / name, content);
}

std::vector<double> theory_tau_pmf(const Manifest& m, std::size_t up_to) {
  // reference rejection-count law: valid below the critical level
  PValueLaw law = law_of(m.model);
  double c = m.alpha * law.fprime_at_zero();
  if (!(c > 0.0 && c < 1.0)) return {};
  TauDistribution dist = tau_distribution(c, 1e-10, up_to);
  return dist.pmf;
}

int cmd_theory(const CommonOpts& o, std::ostream& out) {
  Manifest m = load(o);
  PValueLaw law = law_of(m.model);
  CriticalitySummary s = summarize_criticality(law, m.alpha, m.theory_ell);
  json j = to_json(s);
  out << j.dump(2) << "\n" << criticality_table(s);
  if (!o.out_dir.empty()) {
    fs::path dir = ensure_out_dir(o.out_dir);
    json full{{"seed", m.seed}, {"model", to_json(m.model)}, {"theory", j}};
    write_outputs(dir, {{"theory.json", full.dump(2) + "\n"}});
  }
  if (!s.u_star_converged)
    throw ConvergenceFailure("fixed-point iteration did not converge");
  return kExitOk;
}

int cmd_tau(double c, std::optional<std::size_t> k_max, std::size_t sim_draws,
            std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  TauDistribution dist = tau_distribution(c, 1e-10, k_max.value_or(0));
  if (k_max && dist.pmf.size() > *k_max + 1) dist.pmf.resize(*k_max + 1);
  std::vector<double> empirical;
  if (sim_draws > 0) {
    empirical.assign(dist.pmf.size(), 0.0);
    Engine eng = make_engine(seed, 0);
    for (std::size_t i = 0; i < sim_draws; ++i) {
      std::size_t k = simulate_tau(c, eng);
      if (k < empirical.size()) empirical[k] += 1.0 / static_cast<double>(sim_draws);
    }
  }
  std::string csv = tau_csv(dist, empirical, seed);
  out << csv;
  if (!out_dir.empty()) write_outputs(ensure_out_dir(out_dir), {{"pmf.csv", csv}});
  return kExitOk;
}

std::vector<double> read_pvalue_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("pvalues \"" + path + "\": cannot open for reading");
  std::vector<double> p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      p.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ConfigError("pvalues \"" + path + "\": bad number \"" + line + "\"");
    }
  }
  if (p.empty()) throw ConfigError("pvalues \"" + path + "\": no values");
  return p;
}

struct SampleOrFile {
  std::vector<double> p;
  std::vector<std::uint8_t> truth;
};

SampleOrFile obtain_sample(const CommonOpts& o, const std::string& pvalue_path,
                           std::size_t n, const Manifest* m) {
  SampleOrFile s;
  if (!pvalue_path.empty()) {
    s.p = read_pvalue_file(pvalue_path);
    return s;
  }
  if (!m) throw ConfigError("need --pvalues FILE or --config with a model to sample from");
  if (n == 0) throw ConfigError("--n must be >= 1 when sampling from the model");
  Engine eng = make_engine(m->seed, 0);
  PValueSample ps = sample_pvalues(m->model, n, eng);
  s.p = std::move(ps.p);
  s.truth = std::move(ps.is_false_null);
  return s;
}

int cmd_bh_run(const CommonOpts& o, const std::string& pvalue_path, std::size_t n,
               std::optional<double> alpha_flag, std::ostream& out) {
  std::optional<Manifest> m;
  if (!o.config_path.empty()) m = load(o);
  double alpha = alpha_flag ? *alpha_flag : (m ? m->alpha : 0.0);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("bh-run: need --alpha in (0, 1) or a config");
  SampleOrFile s = obtain_sample(o, pvalue_path, n, m ? &*m : nullptr);
  RejectionResult r = bh(s.p, alpha, s.truth);
  json j = to_json(r);
  j["alpha"] = alpha;
  if (m) j["seed"] = m->seed;
  out << j.dump(2) << "\n";
  out << "BH: R=" << r.rejections << " V=" << r.false_rejections << " power=" << r.power
      << "\n";
  if (!o.out_dir.empty())
    write_outputs(ensure_out_dir(o.out_dir), {{"bh_result.json", j.dump(2) + "\n"}});
  return kExitOk;
}

int cmd_procm_run(const CommonOpts& o, const std::string& pvalue_path, std::size_t n,
                  std::optional<double> alpha_flag, std::optional<double> c_flag,
                  std::ostream& out) {
  std::optional<Manifest> m;
  if (!o.config_path.empty()) m = load(o);
  double alpha = alpha_flag ? *alpha_flag : (m ? m->alpha : 0.0);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("procm-run: need --alpha in (0, 1) or a config");
  std::vector<double> refpoints;
  double c_exponent = c_flag.value_or(1.5);
  if (m && m->procm) {
    refpoints = m->procm->refpoints;
    if (!c_flag && !m->procm->procedures.empty() &&
        m->procm->procedures.front().kind == ProcedureSpec::Kind::M)
      c_exponent = m->procm->procedures.front().c_exponent;
    if (n == 0) n = m->procm->n;
  }
  if (refpoints.empty())
    throw ConfigError("procm-run: config needs a procm section with refpoints");
  SampleOrFile s = obtain_sample(o, pvalue_path, n, m ? &*m : nullptr);
  ProcMResult r = proc_m(s.p, refpoints, alpha, c_exponent, s.truth);
  json j = to_json(r);
  j["alpha"] = alpha;
  j["c_exponent"] = c_exponent;
  if (m) j["seed"] = m->seed;
  out << j.dump(2) << "\n";
  out << "M(" << c_exponent << "): R=" << r.rejections << " V=" << r.false_rejections
      << " power=" << r.power << " intervals=" << r.rejection_intervals.size() << "\n";
  if (!o.out_dir.empty())
    write_outputs(ensure_out_dir(o.out_dir), {{"procm_result.json", j.dump(2) + "\n"}});
  return kExitOk;
}

void print_procedure_lines(const McEstimates& est, std::ostream& out) {
  for (const auto& pe : est.procedures) {
    out << pe.procedure << ": fdr_hat=" << pe.fdr_hat << " pfdr_hat="
        << (std::isfinite(pe.pfdr_hat) ? std::to_string(pe.pfdr_hat) : std::string("NA"))
        << " power_hat=" << pe.power_hat << " positive_runs=" << pe.n_positive << "/"
        << est.runs << "\n";
  }
}

int cmd_mc(const CommonOpts& o, std::ostream& out) {
  Manifest m = load(o);
  if (!m.mc) throw ConfigError("config: missing \"mc\" section");
  ExperimentConfig cfg = *m.mc;
  apply_manifest_globals(m, cfg);
  McEstimates est = run_experiment(cfg);
  std::vector<double> theory = theory_tau_pmf(m, est.procedures.empty()
                                                     ? 0
                                                     : est.procedures.front().pmf_hat.size());
  if (!theory.empty()) attach_reference_distances(est, theory);
  print_procedure_lines(est, out);
  fs::path dir = ensure_out_dir(o.out_dir);
  json summary{{"model", to_json(m.model)}, {"estimates", to_json(est)}};
  write_outputs(dir, {{"summary.json", summary.dump(2) + "\n"},
                      {"table.csv", table_csv(est)},
                      {"pmf.csv", pmf_csv(theory,
                                          est.procedures.empty() ? std::vector<double>{}
                                                                 : est.procedures.front().pmf_hat,
                                          est.seed)}});
  return kExitOk;
}

int cmd_lil(const CommonOpts& o, std::ostream& out) {
  Manifest m = load(o);
  if (!m.lil) throw ConfigError("config: missing \"lil\" section");
  ExperimentConfig cfg = *m.lil;
  apply_manifest_globals(m, cfg);
  McEstimates est = run_lil_experiment(cfg);
  out << "LIL: lambda=" << est.lil->lambda << " p_star=" << est.lil->p_star << " q_hat(1)="
      << est.lil->q_hat[0].second << " runs=" << est.runs << "\n";
  fs::path dir = ensure_out_dir(o.out_dir);
  json summary{{"model", to_json(m.model)}, {"estimates", to_json(est)}};
  write_outputs(dir, {{"summary.json", summary.dump(2) + "\n"},
                      {"lil.csv", lil_csv(est)},
                      {"lil_trajectories.csv", lil_trajectories_csv(est)}});
  return kExitOk;
}

int cmd_cover(const CommonOpts& o, std::ostream& out) {
  Manifest m = load(o);
  if (!m.cover) throw ConfigError("config: missing \"cover\" section");
  ExperimentConfig cfg = *m.cover;
  apply_manifest_globals(m, cfg);
  if (cfg.cover_grid.empty()) throw ConfigError("config.cover: missing \"grid_points\"");
  McEstimates est = run_cover_experiment(cfg);
  print_procedure_lines(est, out);
  fs::path dir = ensure_out_dir(o.out_dir);
  json summary{{"model", to_json(m.model)}, {"estimates", to_json(est)}};
  write_outputs(dir, {{"summary.json", summary.dump(2) + "\n"},
                      {"table.csv", table_csv(est)},
                      {"cover.csv", cover_csv(est)}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fdrlab: criticality diagnostics and multi-reference-point FDR procedures"};
  app.require_subcommand(1);

  CommonOpts theory_opts, tau_common, bh_opts, procm_opts, mc_opts, lil_opts, cover_opts;

  auto* theory = app.add_subcommand("theory", "critical level, fixed points, fluctuation constants");
  add_common(theory, theory_opts, true);

  auto* tau = app.add_subcommand("tau", "rejection-count limit law table");
  double tau_c = 0.5;
  std::optional<std::size_t> tau_kmax;
  std::size_t tau_draws = 0;
  std::uint64_t tau_seed = 1;
  std::string tau_out;
  tau->add_option("--c", tau_c, "drift parameter in (0, 1)")->required();
  tau->add_option("--k-max", tau_kmax, "truncate the table at this k");
  tau->add_option("--sim-draws", tau_draws, "add an empirical column from this many draws");
  tau->add_option("--seed", tau_seed, "seed for the empirical column");
  tau->add_option("--out-dir", tau_out, "directory for pmf.csv");

  auto* bhr = app.add_subcommand("bh-run", "step-up rule on one sample");
  std::string bh_pvalues, procm_pvalues;
  std::size_t bh_n = 0, procm_n = 0;
  std::optional<double> bh_alpha, procm_alpha, procm_c;
  add_common(bhr, bh_opts, false);
  bhr->add_option("--pvalues", bh_pvalues, "newline-delimited p-value file");
  bhr->add_option("--n", bh_n, "sample size when drawing from the config model");
  bhr->add_option("--alpha", bh_alpha, "target level override");

  auto* procm = app.add_subcommand("procm-run", "multi-reference-point procedure on one sample");
  add_common(procm, procm_opts, false);
  procm->add_option("--pvalues", procm_pvalues, "newline-delimited p-value file");
  procm->add_option("--n", procm_n, "sample size when drawing from the config model");
  procm->add_option("--alpha", procm_alpha, "target level override");
  procm->add_option("--c-exponent", procm_c, "rejection-count threshold exponent");

  auto* mc = app.add_subcommand("mc", "Monte Carlo FDR/pFDR/power estimates");
  add_common(mc, mc_opts, true);
  auto* lil = app.add_subcommand("lil", "prefix fluctuation experiment");
  add_common(lil, lil_opts, true);
  auto* cover = app.add_subcommand("cover", "rejection-coverage curves");
  add_common(cover, cover_opts, true);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (theory->parsed()) return cmd_theory(theory_opts, out);
    if (tau->parsed()) {
      if (!(tau_c > 0.0 && tau_c < 1.0)) throw ConfigError("tau: --c must be in (0, 1)");
      return cmd_tau(tau_c, tau_kmax, tau_draws, tau_seed, tau_out, out);
    }
    if (bhr->parsed()) return cmd_bh_run(bh_opts, bh_pvalues, bh_n, bh_alpha, out);
    if (procm->parsed())
      return cmd_procm_run(procm_opts, procm_pvalues, procm_n, procm_alpha, procm_c, out);
    if (mc->parsed()) return cmd_mc(mc_opts, out);
    if (lil->parsed()) return cmd_lil(lil_opts, out);
    if (cover->parsed()) return cmd_cover(cover_opts, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConvergenceFailure& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace fdrlab::cli
