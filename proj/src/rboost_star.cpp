#include "replboost/rboost_star.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "replboost/rthreshold.hpp"
#include "replboost/sampling.hpp"

namespace replboost {

double mu_star(double g, double gamma) {
  if (g <= 0.0) return 1.0;
  return std::pow(1.0 - gamma, g / 2.0);
}

BoostState::BoostState(std::shared_ptr<const Domain> domain, const TargetFunction& target,
                       double gamma)
    : domain_(std::move(domain)),
      labels_(target.labels()),
      gamma_(gamma),
      theta_(gamma / (2.0 + gamma)),
      agree_(labels_.size(), 0),
      upto_(labels_.size(), 0) {}

double BoostState::g(PointId x) const {
  long& acc = agree_[x];
  std::uint32_t& n = upto_[x];
  const auto features = domain_->features(x);
  for (; n < hypotheses_.size(); ++n) acc += hypotheses_[n].predict(features) * labels_[x];
  return static_cast<double>(acc) - static_cast<double>(hypotheses_.size()) * theta_;
}

PointFunction BoostState::mu_function() const {
  return [this](PointId x) { return mu(x); };
}

RBoostStarPlan plan_rboost_star(const BoostConfig& cfg, const WeakLearner& learner) {
  cfg.validate();
  RBoostStarPlan plan;
  const double t0 = std::ceil(cfg.c0 / (cfg.eps * cfg.gamma * cfg.gamma));
  plan.t0_max = detail::ceil_count(t0, "rBoost* round cap");
  plan.period = static_cast<std::uint64_t>(std::floor(1.0 / cfg.gamma));
  const double t0d = static_cast<double>(plan.t0_max);

  Budget& b = plan.budget;
  b.rho_weak = cfg.rho / (6.0 * t0d);
  b.rho_threshold = cfg.rho / (6.0 * cfg.gamma * t0d);
  b.delta_threshold = std::min(cfg.rho / (48.0 * cfg.gamma * t0d), b.rho_threshold / 8.0);
  b.threshold_calls = plan.t0_max / plan.period;
  if (cfg.mode == Mode::kSampled) {
    b.threshold_samples = detail::apply_cap(
        threshold_sample_size({cfg.eps / 2.0, b.rho_threshold, b.delta_threshold},
                              cfg.budget_scale, cfg.c_threshold),
        cfg.sample_cap);
  }
  if (learner.needs_samples()) {
    b.weak_samples = learner.sample_complexity(b.rho_weak);
    b.rejection_target = b.weak_samples;
    b.delta_rejection = cfg.rho / (6.0 * t0d);
    b.rejection_eps = cfg.eps / 8.0;
    b.rejection_input = rejection_input_size(b.rejection_target, b.rejection_eps,
                                             b.delta_rejection, cfg.budget_scale,
                                             cfg.rejection_factor);
    b.rejection_calls = plan.t0_max;
  }
  const double total = static_cast<double>(b.rejection_calls) * static_cast<double>(b.rejection_input) +
                       static_cast<double>(b.threshold_calls) * static_cast<double>(b.threshold_samples);
  b.total = detail::ceil_count(total, "rBoost* sample budget");
  return plan;
}

namespace {

bool threshold_guarantee_violated(double mean, double z, int bit) {
  return (mean <= z / 2.0 && bit == 1) || (mean >= 2.0 * z && bit == 0);
}

}  // namespace

RunReport rboost_star(const Problem& problem, Sample* sample, const WeakLearner& learner,
                      const BoostConfig& cfg, const RandomTape& tape) {
  const RBoostStarPlan plan = plan_rboost_star(cfg, learner);
  const Budget& budget = plan.budget;
  const bool sampled_check = cfg.mode == Mode::kSampled;
  const bool uses_samples = sampled_check || learner.needs_samples();
  if (uses_samples) {
    if (sample == nullptr) throw Error(ErrorKind::kConfiguration, "rBoost* needs a sample");
    if (sample->remaining() < budget.total) {
      throw Error(ErrorKind::kInsufficientSamples,
                  "rBoost* budget is " + std::to_string(budget.total) + " samples, " +
                      std::to_string(sample->remaining()) + " available");
    }
  }

  RunReport report;
  report.algorithm = "rboost_star";
  report.config = cfg;
  report.root_seed = tape.root_seed();
  report.budget = budget;
  report.round_cap = plan.t0_max;

  BoostState state(problem.domain, problem.target, cfg.gamma);
  const PointFunction mu = state.mu_function();
  const std::uint64_t start = uses_samples ? sample->consumed() : 0;
  std::uint64_t reserved = 0;

  for (std::uint64_t t = 1;; ++t) {
    if (t > plan.t0_max) {
      throw Error(ErrorKind::kIterationCapExceeded,
                  "no termination within T0_max = " + std::to_string(plan.t0_max) + " rounds");
    }
    const RandomTape round = tape.derive("rboost", t);
    IterationRecord rec;
    rec.t = t;
    // mu_t is described by the t-1 hypotheses pushed so far.
    rec.density = density(mu, problem.dist);

    LearnInput input;
    input.rho = budget.rho_weak;
    input.tape = round.derive("wl", 0);
    Sample learner_sample = Sample::from_ids({});
    std::optional<FiniteDistribution> d_mu;
    if (learner.needs_samples()) {
      Sample fresh = sample->take(budget.rejection_input);
      reserved += budget.rejection_input;
      try {
        learner_sample = rejection_sample(fresh, budget.rejection_target, mu,
                                          round.derive("reject", 0));
      } catch (const Error& e) {
        throw e.annotated("rBoost* t=" + std::to_string(t) + " reject");
      }
      input.sample = &learner_sample;
    }
    d_mu.emplace(reweighted_distribution(mu, problem.dist));
    input.exact = &*d_mu;

    LearnResult learned;
    try {
      learned = learner.learn(input);
    } catch (const Error& e) {
      throw e.annotated("rBoost* t=" + std::to_string(t) + " weak learner");
    }
    rec.hypothesis = learned.hypothesis;
    rec.train_error = learned.training_error;
    rec.exact_error = exact_error(learned.hypothesis, problem, *d_mu);

    bool stop = false;
    if (t % plan.period == 0) {
      const double z = cfg.eps / 2.0;
      rec.exact_mean = rec.density;
      if (sampled_check) {
        Sample fresh = sample->take(budget.threshold_samples);
        reserved += budget.threshold_samples;
        const ThresholdOutcome out =
            rthreshold(fresh, z, mu, round.derive("thresh", 0), budget.threshold_samples);
        rec.threshold_bit = out.bit;
        rec.phi_bar = out.phi_bar;
        rec.cutoff = out.cutoff;
        rec.threshold_failed = threshold_guarantee_violated(rec.density, z, out.bit);
      } else {
        rec.threshold_bit = rec.density < z ? 0 : 1;
      }
      stop = rec.threshold_bit == 0;
    }

    state.push(learned.hypothesis);
    ++report.wl_calls;
    rec.reserved = reserved;
    rec.consumed = uses_samples ? sample->consumed() - start : 0;
    report.iterations.push_back(std::move(rec));
    if (stop) {
      report.exited_by_threshold = true;
      break;
    }
  }

  report.final_density = density(mu, problem.dist);
  report.output = MajorityVote(state.hypotheses());
  report.exact_error = exact_error(report.output, problem);
  return report;
}

}  // namespace replboost
