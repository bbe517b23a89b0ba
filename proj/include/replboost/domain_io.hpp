#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "replboost/core.hpp"

namespace replboost {

/// {points: [[...], ...], probs: [...], labels: [...], ranges?: [[lo, hi], ...]}
Problem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const Problem& problem);
/// Throws Error(kConfiguration) when the file is missing or malformed.
Problem load_problem(const std::string& path);
void save_problem(const Problem& problem, const std::string& path);

/// CSV rows of features followed by a -1/+1 label; an optional header row is
/// skipped. Distinct feature rows form the domain and D is their empirical
/// frequency. Rows with equal features and different labels are rejected.
Problem load_dataset_csv(const std::string& path);

struct MarginDomainSpec {
  std::size_t size = 64;
  std::size_t dimension = 2;
  std::size_t stumps = 5;       // terms of the hidden weighted vote
  double margin = 0.1;
  std::size_t resolution = 32;  // grid the hidden stumps are taken from
  std::uint64_t seed = 1;
};

// Points in [0,1]^d labeled by sign F(x) with F a positive-weight (sum 1)
// combination of grid stumps, keeping only points with |F(x)| >= 2 margin.
// For any reweighting D' of such a domain E_{D'}[F f] >= 2 margin, so one of
// the hidden stumps has error <= 1/2 - margin under D'.
Problem generate_margin_domain(const MarginDomainSpec& spec);

/// Two points {0 -> label -1, 1 -> label +1} with D(1) = mean.
Problem bernoulli_problem(double mean);

}  // namespace replboost
