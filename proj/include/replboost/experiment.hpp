#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "json.hpp"
#include "replboost/config.hpp"
#include "replboost/core.hpp"
#include "replboost/report.hpp"
#include "replboost/weak.hpp"

namespace replboost {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExperimentConfig {
  std::string algorithm = "rmetaboost";  // rboost-star | rmetaboost
  BoostConfig boost;
  std::string learner = "oracle";  // oracle | replicable
  std::size_t grid_resolution = StumpGrid::kDefaultResolution;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  std::string domain_path;
  std::string output_dir;
  unsigned jobs = 1;

  /// Throws Error(kConfiguration).
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Sets every key present in a flat JSON object; unknown keys are an error.
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

/// Oracle or replicable stump learner over the domain's grid. The
/// replicable learner uses budget_scale and sample_cap from `boost`.
std::shared_ptr<const WeakLearner> make_learner(const std::string& kind, const Problem& problem,
                                                std::size_t resolution, const BoostConfig& boost);

struct TrialOutcome {
  bool ok = false;
  RunReport report;
  std::string error_kind;
  std::string message;
};

/// One run with tape RandomTape(root_seed) and a lazily drawn i.i.d. sample
/// of exactly the planned budget. Algorithm errors are caught and returned.
TrialOutcome run_trial(const std::string& algorithm, const Problem& problem,
                       const WeakLearner& learner, const BoostConfig& boost,
                       std::uint64_t root_seed, std::uint64_t data_seed);

/// Summary CSV header and row, fixed formatting.
std::string summary_header();
std::string summary_row(std::uint64_t trial, const TrialOutcome& outcome);

/// Writes trial_NNNN.json, summary.csv and manifest.json into output_dir.
/// Returns 0 on success, 2 on a usage or input error (nothing written when
/// the configuration or domain is invalid).
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace replboost
