#include "replboost/rmetaboost.hpp"

#include <algorithm>
#include <string>

#include "replboost/rthreshold.hpp"
#include "replboost/sampling.hpp"

namespace replboost {

std::uint64_t compute_T(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::kConfiguration, "eps must lie in (0,1)");
  return detail::ceil_count(8.0 * std::log(2.0 / eps), "T");
}

MetaState::MetaState(std::shared_ptr<const Problem> problem)
    : problem_(std::move(problem)),
      m_value_(problem_->size(), 0),
      m_upto_(problem_->size(), 0) {}

int MetaState::misses(std::size_t s, PointId x) const {
  std::int8_t& cached = miss_[s][x];
  if (cached < 0) {
    cached = votes_[s].predict(*problem_->domain, x) != problem_->target(x) ? 1 : 0;
  }
  return cached;
}

int MetaState::M(PointId x) const {
  int& value = m_value_[x];
  std::uint32_t& upto = m_upto_[x];
  for (; upto < votes_.size(); ++upto) {
    value = std::min(value + misses(upto, x), caps_[upto + 1]);
  }
  return value;
}

int MetaState::N_next(PointId x, const MajorityVote& h) const {
  return M(x) + (h.predict(*problem_->domain, x) != problem_->target(x) ? 1 : 0);
}

PointFunction MetaState::mu_function() const {
  return [this](PointId x) { return mu(x); };
}

MetaState MetaState::step(const MajorityVote& h, int bit) const {
  if (bit != 0 && bit != 1) throw Error(ErrorKind::kConfiguration, "threshold bit must be 0 or 1");
  MetaState next = *this;
  next.votes_.push_back(h);
  next.caps_.push_back(cap() + bit);
  next.bits_.push_back(bit);
  next.miss_.emplace_back(problem_->size(), static_cast<std::int8_t>(-1));
  return next;
}

MetaState meta_step_counters(const MetaState& state, const MajorityVote& h, int b_next) {
  return state.step(h, b_next);
}

MetaPlan plan_rmetaboost(const BoostConfig& cfg, const WeakLearner& learner) {
  cfg.validate();
  MetaPlan plan;
  plan.T = compute_T(cfg.eps);
  const double T = static_cast<double>(plan.T);

  plan.inner = cfg;
  plan.inner.rho = cfg.rho / (6.0 * T);
  plan.inner.eps = cfg.eps0;
  plan.inner_plan = plan_rboost_star(plan.inner, learner);

  Budget& b = plan.budget;
  b.rho_weak = plan.inner.rho;
  b.rho_threshold = cfg.rho / (3.0 * T);
  b.delta_threshold = b.rho_threshold / 8.0;  // = rho / (24 T)
  b.threshold_calls = plan.T;
  b.threshold_samples = detail::apply_cap(
      threshold_sample_size({cfg.eps / 16.0, b.rho_threshold, b.delta_threshold},
                            cfg.budget_scale, cfg.c_threshold),
      cfg.sample_cap);
  const std::uint64_t inner_total = plan.inner_plan.budget.total;
  if (inner_total > 0) {
    b.rejection_target = inner_total;
    b.rejection_eps = cfg.eps / 32.0;
    b.delta_rejection = cfg.rho / (6.0 * T);
    b.rejection_input = rejection_input_size(inner_total, b.rejection_eps, b.delta_rejection,
                                             cfg.budget_scale, cfg.rejection_factor);
    b.rejection_calls = plan.T;
  }
  const double total =
      static_cast<double>(b.rejection_calls) * static_cast<double>(b.rejection_input) +
      static_cast<double>(b.threshold_calls) * static_cast<double>(b.threshold_samples);
  b.total = detail::ceil_count(total, "rMetaBoost sample budget");
  return plan;
}

RunReport rmetaboost(const Problem& problem, Sample& sample, const WeakLearner& learner,
                     const BoostConfig& cfg, const RandomTape& tape) {
  const MetaPlan plan = plan_rmetaboost(cfg, learner);
  const Budget& budget = plan.budget;
  if (sample.remaining() < budget.total) {
    throw Error(ErrorKind::kInsufficientSamples,
                "rMetaBoost budget is " + std::to_string(budget.total) + " samples, " +
                    std::to_string(sample.remaining()) + " available");
  }

  RunReport report;
  report.algorithm = "rmetaboost";
  report.config = cfg;
  report.root_seed = tape.root_seed();
  report.budget = budget;
  report.round_cap = plan.T;

  auto shared = std::make_shared<const Problem>(problem);
  MetaState state(shared);
  const std::uint64_t start = sample.consumed();
  std::uint64_t reserved = 0;
  const double z = cfg.eps / 16.0;

  for (std::uint64_t t = 1; t <= plan.T; ++t) {
    const RandomTape round = tape.derive("meta", t);
    const std::string where = "rMetaBoost (t=" + std::to_string(t) + ", ";
    IterationRecord rec;
    rec.t = t;
    rec.cap = state.cap();
    const PointFunction mu = state.mu_function();
    rec.density = density(mu, problem.dist);

    // rBoost* learns against D_{mu_t}; its exact bookkeeping uses that distribution.
    const Problem inner_problem(problem.domain, problem.target,
                                reweighted_distribution(mu, problem.dist));
    RunReport inner;
    try {
      if (budget.rejection_input > 0) {
        Sample fresh = sample.take(budget.rejection_input);
        reserved += budget.rejection_input;
        // mu_t is frozen for this round; memoize it per point for the scan.
        auto memo = std::make_shared<std::vector<double>>(problem.size(), -1.0);
        PointFunction mu_memo = [memo, mu](PointId x) {
          double& v = (*memo)[x];
          if (v < 0.0) v = mu(x);
          return v;
        };
        Sample drawn = rejection_stream(std::move(fresh), budget.rejection_target, mu_memo,
                                        round.derive("reject", 0));
        inner = rboost_star(inner_problem, &drawn, learner, plan.inner, round.derive("inner", 0));
      } else {
        inner = rboost_star(inner_problem, nullptr, learner, plan.inner, round.derive("inner", 0));
      }
    } catch (const Error& e) {
      const bool from_sampler = e.kind() == ErrorKind::kSamplesExhausted;
      throw e.annotated(where + (from_sampler ? "reject)" : "inner)"));
    }
    const MajorityVote& h = inner.output;
    rec.vote = h;
    rec.exact_error = inner.exact_error;
    rec.train_error = inner.exact_error;
    rec.inner_rounds = inner.wl_calls;
    rec.inner_threshold_failure = inner.any_threshold_failure();
    report.wl_calls += inner.wl_calls;

    const int next_cap = state.cap() + 1;
    PointFunction phi = [&state, &h, next_cap](PointId x) {
      return state.N_next(x, h) == next_cap ? 1.0 : 0.0;
    };
    rec.exact_mean = density(phi, problem.dist);
    try {
      Sample fresh = sample.take(budget.threshold_samples);
      reserved += budget.threshold_samples;
      const ThresholdOutcome out =
          rthreshold(fresh, z, phi, round.derive("thresh", 0), budget.threshold_samples);
      rec.threshold_bit = out.bit;
      rec.phi_bar = out.phi_bar;
      rec.cutoff = out.cutoff;
    } catch (const Error& e) {
      throw e.annotated(where + "thresh)");
    }
    rec.threshold_failed = (rec.exact_mean <= z / 2.0 && rec.threshold_bit == 1) ||
                           (rec.exact_mean >= 2.0 * z && rec.threshold_bit == 0);

    state = meta_step_counters(state, h, rec.threshold_bit);
    rec.reserved = reserved;
    rec.consumed = sample.consumed() - start;
    report.iterations.push_back(std::move(rec));
    report.inner.push_back(std::move(inner));
  }

  report.caps = state.caps();
  report.final_density = density(state.mu_function(), problem.dist);
  report.votes = state.votes();
  report.exact_error = exact_error(
      [&](PointId x) { return report.predict(*problem.domain, x); }, problem.dist, problem.target);
  return report;
}

}  // namespace replboost
