#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "replboost/config.hpp"
#include "replboost/core.hpp"
#include "replboost/weak.hpp"

namespace replboost {

// Per-line sample budgets of one algorithm run, after budget_scale and cap.
struct Budget {
  std::uint64_t weak_samples = 0;       // m_W per weak-learner call (rBoost*)
  std::uint64_t rejection_target = 0;   // accepted points requested per rejection call
  std::uint64_t rejection_input = 0;    // fresh samples reserved per rejection call
  std::uint64_t threshold_samples = 0;  // fresh samples per threshold check
  std::uint64_t rejection_calls = 0;
  std::uint64_t threshold_calls = 0;
  std::uint64_t total = 0;  // rejection_calls * rejection_input + threshold_calls * threshold_samples

  double rho_weak = 0.0;        // replicability handed to the weak learner / inner booster
  double rho_threshold = 0.0;   // per threshold call
  double delta_threshold = 0.0;
  double delta_rejection = 0.0;
  double rejection_eps = 0.0;   // density lower bound assumed by the rejection bound
};

struct IterationRecord {
  static constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

  std::uint64_t t = 0;
  double density = 0.0;  // exact d(mu_t)
  int cap = 0;           // c_t (meta booster)

  // rBoost*: the weak hypothesis; meta booster: the inner majority vote.
  Hypothesis hypothesis;
  MajorityVote vote;
  double train_error = kNan;  // what the learner saw (exact or empirical)
  double exact_error = kNan;  // exact error of h_t under D_{mu_t}
  std::uint64_t inner_rounds = 0;
  bool inner_threshold_failure = false;

  int threshold_bit = -1;  // -1 when no check ran this iteration
  double phi_bar = kNan;
  double cutoff = kNan;
  double exact_mean = kNan;  // E_D[phi] of the checked function
  bool threshold_failed = false;  // a threshold guarantee was violated

  std::uint64_t reserved = 0;  // cumulative fresh samples reserved
  std::uint64_t consumed = 0;  // cumulative fresh samples actually read
};

struct RunReport {
  std::string algorithm;  // "rboost_star" or "rmetaboost"
  BoostConfig config;
  std::uint64_t root_seed = 0;
  Budget budget;
  std::uint64_t round_cap = 0;  // T0_max or T
  std::vector<IterationRecord> iterations;
  std::vector<int> caps;  // meta: c_1..c_{T+1}
  double final_density = 0.0;  // d(mu) after the last update
  bool exited_by_threshold = false;
  MajorityVote output;            // rBoost*: H = sign(sum h_t)
  std::vector<MajorityVote> votes;  // meta: H = sign(sum_t h_t) over inner votes
  double exact_error = 0.0;
  std::uint64_t wl_calls = 0;
  std::vector<RunReport> inner;  // meta: one rBoost* report per outer round

  bool any_threshold_failure() const;
  /// H(x) for either algorithm.
  Label predict(const Domain& domain, PointId x) const;
  /// Canonical text of H; equal outputs give equal keys.
  std::string output_key() const;
};

nlohmann::json to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MajorityVote& h);
MajorityVote majority_vote_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StumpGrid& grid);
nlohmann::json to_json(const BoostConfig& cfg);
nlohmann::json to_json(const Budget& b);
nlohmann::json to_json(const RunReport& report, bool include_inner = true);

/// Canonical text of a majority vote; equal votes give equal keys.
std::string canonical_key(const MajorityVote& h);
std::string canonical_key(const std::vector<MajorityVote>& votes);
/// 16 hex digits of a 64-bit FNV-1a hash of the report's output key.
std::string agreement_key(const RunReport& report);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace replboost
