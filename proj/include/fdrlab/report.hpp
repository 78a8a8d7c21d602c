#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fdrlab/criticality.hpp"
#include "fdrlab/excursion.hpp"
#include "fdrlab/mc.hpp"

namespace fdrlab {

/// Full-precision decimal rendering (17 significant digits).
std::string format_full(double v);

/// Writes via a temp file in the same directory, then renames into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// "k,p_k" table, optionally with an empirical column "k,p_k,p_hat_k".
std::string tau_csv(const TauDistribution& dist, std::span<const double> empirical,
                    std::uint64_t seed);

/// "k,p_theory,p_hat" for one procedure's rejection-count law.
std::string pmf_csv(std::span<const double> theory, std::span<const double> empirical,
                    std::uint64_t seed);

/// "procedure,fdr_hat,pfdr_hat,power_hat,n_positive".
std::string table_csv(const McEstimates& est);

/// "run,max_abs_L" and the long-format trajectory file "run,n_k,L".
std::string lil_csv(const McEstimates& est);
std::string lil_trajectories_csv(const McEstimates& est);

/// "t,f_prime,p_cover_<proc>...".
std::string cover_csv(const McEstimates& est);

/// Aligned two-column text table of the criticality report.
std::string criticality_table(const CriticalitySummary& s);

}  // namespace fdrlab
