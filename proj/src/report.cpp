#include "replboost/report.hpp"

#include <cstdio>
#include <sstream>

namespace replboost {

using nlohmann::json;

bool RunReport::any_threshold_failure() const {
  for (const auto& rec : iterations) {
    if (rec.threshold_failed || rec.inner_threshold_failure) return true;
  }
  for (const auto& r : inner) {
    if (r.any_threshold_failure()) return true;
  }
  return false;
}

Label RunReport::predict(const Domain& domain, PointId x) const {
  if (algorithm != "rmetaboost") return output.predict(domain, x);
  long sum = 0;
  for (const auto& v : votes) sum += v.predict(domain, x);
  return sum >= 0 ? 1 : -1;
}

std::string RunReport::output_key() const {
  return algorithm == "rmetaboost" ? canonical_key(votes) : canonical_key(output);
}

json to_json(const Hypothesis& h) {
  if (h.kind == Hypothesis::Kind::kConstant) {
    return {{"kind", "constant"}, {"polarity", h.polarity}};
  }
  return {{"kind", "stump"},
          {"feature", h.feature},
          {"threshold", h.threshold},
          {"polarity", h.polarity}};
}

Hypothesis hypothesis_from_json(const json& j) {
  const int polarity = j.at("polarity").get<int>();
  if (polarity != 1 && polarity != -1) {
    throw Error(ErrorKind::kConfiguration, "hypothesis polarity must be -1 or +1");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Hypothesis::constant(polarity);
  if (kind == "stump") {
    return Hypothesis::stump(j.at("feature").get<std::uint32_t>(), j.at("threshold").get<double>(),
                             polarity);
  }
  throw Error(ErrorKind::kConfiguration, "unknown hypothesis kind '" + kind + "'");
}

json to_json(const MajorityVote& h) {
  json arr = json::array();
  for (const auto& x : h.hypotheses()) arr.push_back(to_json(x));
  return arr;
}

MajorityVote majority_vote_from_json(const json& j) {
  MajorityVote vote;
  for (const auto& x : j) vote.push_back(hypothesis_from_json(x));
  return vote;
}

json to_json(const StumpGrid& grid) {
  return {{"resolution", grid.resolution()}, {"thresholds", grid.thresholds()}};
}

json to_json(const BoostConfig& cfg) {
  return {{"rho", cfg.rho},
          {"eps", cfg.eps},
          {"gamma", cfg.gamma},
          {"eps0", cfg.eps0},
          {"c_threshold", cfg.c_threshold},
          {"rejection_factor", cfg.rejection_factor},
          {"c0", cfg.c0},
          {"budget_scale", cfg.budget_scale},
          {"sample_cap", cfg.sample_cap},
          {"mode", to_string(cfg.mode)}};
}

json to_json(const Budget& b) {
  return {{"weak_samples", b.weak_samples},
          {"rejection_target", b.rejection_target},
          {"rejection_input", b.rejection_input},
          {"threshold_samples", b.threshold_samples},
          {"rejection_calls", b.rejection_calls},
          {"threshold_calls", b.threshold_calls},
          {"total", b.total},
          {"rho_weak", b.rho_weak},
          {"rho_threshold", b.rho_threshold},
          {"delta_threshold", b.delta_threshold},
          {"delta_rejection", b.delta_rejection},
          {"rejection_eps", b.rejection_eps}};
}

namespace {

json to_json(const IterationRecord& r, bool meta) {
  json j = {{"t", r.t}, {"density", r.density}, {"train_error", r.train_error},
            {"exact_error", r.exact_error}, {"reserved", r.reserved}, {"consumed", r.consumed}};
  if (meta) {
    j["cap"] = r.cap;
    j["vote"] = to_json(r.vote);
    j["inner_rounds"] = r.inner_rounds;
    j["inner_threshold_failure"] = r.inner_threshold_failure;
  } else {
    j["hypothesis"] = to_json(r.hypothesis);
  }
  if (r.threshold_bit >= 0) {
    j["threshold"] = {{"bit", r.threshold_bit},
                      {"phi_bar", r.phi_bar},
                      {"cutoff", r.cutoff},
                      {"exact_mean", r.exact_mean},
                      {"failed", r.threshold_failed}};
  }
  return j;
}

}  // namespace

json to_json(const RunReport& report, bool include_inner) {
  const bool meta = report.algorithm == "rmetaboost";
  json iterations = json::array();
  for (const auto& r : report.iterations) iterations.push_back(to_json(r, meta));
  json j = {{"algorithm", report.algorithm},
            {"config", to_json(report.config)},
            {"root_seed", report.root_seed},
            {"budget", to_json(report.budget)},
            {"round_cap", report.round_cap},
            {"iterations", std::move(iterations)},
            {"final_density", report.final_density},
            {"exact_error", report.exact_error},
            {"wl_calls", report.wl_calls},
            {"threshold_failure", report.any_threshold_failure()},
            {"agreement_key", agreement_key(report)}};
  if (meta) {
    j["caps"] = report.caps;
    json votes = json::array();
    for (const auto& v : report.votes) votes.push_back(to_json(v));
    j["output"] = std::move(votes);
    if (include_inner) {
      json inner = json::array();
      for (const auto& r : report.inner) inner.push_back(to_json(r, false));
      j["inner"] = std::move(inner);
    }
  } else {
    j["exited_by_threshold"] = report.exited_by_threshold;
    j["output"] = to_json(report.output);
  }
  return j;
}

std::string canonical_key(const MajorityVote& h) {
  std::string out;
  for (const auto& x : h.hypotheses()) {
    if (!out.empty()) out += ';';
    out += x.to_string();
  }
  return out;
}

std::string canonical_key(const std::vector<MajorityVote>& votes) {
  std::string out;
  for (const auto& v : votes) out += "[" + canonical_key(v) + "]";
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string agreement_key(const RunReport& report) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(report.output_key())));
  return buf;
}

}  // namespace replboost
