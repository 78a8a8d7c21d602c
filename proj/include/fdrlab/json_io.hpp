#pragma once

#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>

#include "fdrlab/criticality.hpp"
#include "fdrlab/mc.hpp"
#include "fdrlab/procedures.hpp"

namespace fdrlab {

/// Configuration problem: bad file, malformed JSON, unknown or missing key.
/// The message carries the offending location (file / JSON path / key).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const DistributionSpec& spec);
DistributionSpec distribution_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const RandomEffectsModel& model);
RandomEffectsModel model_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const CriticalitySummary& s);

nlohmann::json to_json(const RejectionResult& r);
nlohmann::json to_json(const ProcMResult& r);

nlohmann::json to_json(const McEstimates& est);
McEstimates estimates_from_json(const nlohmann::json& j);

/// Parsed experiment manifest: the model plus per-subcommand sections.
struct Manifest {
  RandomEffectsModel model;
  double alpha = 0.1;
  std::uint64_t seed = 1;
  int threads = 0;
  std::optional<long> theory_ell;

  std::optional<ExperimentConfig> mc;      // "mc" section
  std::optional<ExperimentConfig> lil;     // "lil" section
  std::optional<ExperimentConfig> cover;   // "cover" section
  std::optional<ExperimentConfig> procm;   // "procm" section (single-sample runs)
};

/// Strict parse: unknown keys anywhere are a hard error.
Manifest manifest_from_json(const nlohmann::json& j, const std::string& where);

/// Reads a file, parses JSON (reporting the parse location on failure),
/// applies dotted-path overrides ("mc.runs=500"), and builds the manifest.
Manifest load_manifest(const std::string& path, const std::vector<std::string>& overrides);

/// Reference-point list: accepts an array of numbers or
/// {"start": s, "step": d, "count": m}; values within 1e-12 of 0 or 1 snap.
std::vector<double> refpoints_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace fdrlab
