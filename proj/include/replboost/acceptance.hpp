#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace replboost {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data;  // measured values
};

struct AcceptanceOptions {
  std::uint64_t seed = 20261019;
  unsigned jobs = 1;
  std::vector<int> criteria;  // empty = all
  std::string scratch_dir;    // for the determinism check; empty = system temp
};

/// Criteria ids run by a named suite: threshold, rejection, rboost-star,
/// rmetaboost, replicability, determinism, all.
std::vector<int> suite_criteria(const std::string& suite);

/// Runs the selected criteria in id order; `on_result` sees each result as
/// soon as it is known.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

nlohmann::json to_json(const CriterionResult& r);

}  // namespace replboost
