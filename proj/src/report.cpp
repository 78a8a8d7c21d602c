#include "fdrlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdrlab {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {
std::string seed_line(std::uint64_t seed) {
  return "# master_seed=" + std::to_string(seed) + "\n";
}
}  // namespace

std::string tau_csv(const TauDistribution& dist, std::span<const double> empirical,
                    std::uint64_t seed) {
  std::ostringstream out;
  out << seed_line(seed);
  const bool with_hat = !empirical.empty();
  out << (with_hat ? "k,p_k,p_hat_k\n" : "k,p_k\n");
  for (std::size_t k = 0; k < dist.pmf.size(); ++k) {
    out << k << ',' << format_full(dist.pmf[k]);
    if (with_hat) out << ',' << format_full(k < empirical.size() ? empirical[k] : 0.0);
    out << '\n';
  }
  return out.str();
}

std::string pmf_csv(std::span<const double> theory, std::span<const double> empirical,
                    std::uint64_t seed) {
  std::ostringstream out;
  out << seed_line(seed) << "k,p_theory,p_hat\n";
  const std::size_t m = std::max(theory.size(), empirical.size());
  for (std::size_t k = 0; k < m; ++k) {
    double th = k < theory.size() ? theory[k] : 0.0;
    double em = k < empirical.size() ? empirical[k] : 0.0;
    out << k << ',' << format_full(th) << ',' << format_full(em) << '\n';
  }
  return out.str();
}

std::string table_csv(const McEstimates& est) {
  std::ostringstream out;
  out << seed_line(est.seed) << "procedure,fdr_hat,pfdr_hat,power_hat,n_positive\n";
  for (const auto& pe : est.procedures) {
    out << pe.procedure << ',' << format_full(pe.fdr_hat) << ','
        << (std::isfinite(pe.pfdr_hat) ? format_full(pe.pfdr_hat) : "NA") << ','
        << format_full(pe.power_hat) << ',' << pe.n_positive << '\n';
  }
  return out.str();
}

std::string lil_csv(const McEstimates& est) {
  if (!est.lil) throw std::runtime_error("lil_csv: estimates carry no lil block");
  std::ostringstream out;
  out << seed_line(est.seed) << "run,max_abs_L\n";
  for (std::size_t j = 0; j < est.lil->max_abs_l.size(); ++j)
    out << j << ',' << format_full(est.lil->max_abs_l[j]) << '\n';
  return out.str();
}

std::string lil_trajectories_csv(const McEstimates& est) {
  if (!est.lil) throw std::runtime_error("lil_trajectories_csv: no lil block");
  std::ostringstream out;
  out << seed_line(est.seed) << "run,n_k,L\n";
  for (std::size_t j = 0; j < est.lil->trajectories.size(); ++j) {
    const auto& traj = est.lil->trajectories[j];
    for (std::size_t k = 0; k < traj.size(); ++k)
      out << j << ',' << est.lil->sizes[k] << ',' << format_full(traj[k]) << '\n';
  }
  return out.str();
}

std::string cover_csv(const McEstimates& est) {
  if (!est.cover) throw std::runtime_error("cover_csv: estimates carry no cover block");
  std::ostringstream out;
  out << seed_line(est.seed) << "t,f_prime";
  for (const auto& [tag, curve] : est.cover->p_cover) out << ",p_cover_" << tag;
  out << '\n';
  for (std::size_t g = 0; g < est.cover->grid.size(); ++g) {
    out << format_full(est.cover->grid[g]) << ',' << format_full(est.cover->fprime[g]);
    for (const auto& [tag, curve] : est.cover->p_cover) out << ',' << format_full(curve[g]);
    out << '\n';
  }
  return out.str();
}

std::string criticality_table(const CriticalitySummary& s) {
  auto row = [](const char* name, const std::string& value) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "  %-16s %s\n", name, value.c_str());
    return std::string(buf);
  };
  std::string out;
  out += row("alpha", format_full(s.alpha));
  out += row("alpha_star", format_full(s.alpha_star));
  out += row("beta_star", format_full(s.beta_star));
  out += row("sup_fprime", std::isfinite(s.sup_fprime) ? format_full(s.sup_fprime) : "inf");
  out += row("u_star", format_full(s.u_star));
  out += row("p_star", format_full(s.p_star));
  out += row("q_star", format_full(s.q_star));
  out += row("delta_gap", format_full(s.delta_gap));
  out += row("fprime_u_star", s.fprime_u_star ? format_full(*s.fprime_u_star) : "n/a");
  out += row("lil_lambda", s.lil_lambda ? format_full(*s.lil_lambda) : "n/a");
  out += row("nu0", s.nu0 ? format_full(*s.nu0) : "n/a");
  out += row("converged", s.u_star_converged ? "yes" : "no");
  out += row("tangent", s.tangent ? "yes" : "no");
  return out;
}

}  // namespace fdrlab
