#include "asyncsprt/sprt.hpp"

#include "asyncsprt/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncsprt {

Thresholds thresholds(const SprtConfig& cfg) {
  if (!(cfg.p_fa > 0.0 && cfg.p_fa < cfg.p_d && cfg.p_d < 1.0))
    throw std::invalid_argument("thresholds: need 0 < p_fa < p_d < 1");
  return {std::log(cfg.p_d / cfg.p_fa), std::log((1.0 - cfg.p_d) / (1.0 - cfg.p_fa))};
}

LlrEvaluator::LlrEvaluator(const Scenario& s, const SamplingTimes& t) {
  const CovarianceMatrix cov = build_covariance(s, t);
  const Matrix inv = block_inverse(cov);
  const Vector stilde = s.tilde_signal();
  weights_ = inv * stilde;
  kld_ = 0.5 * stilde.dot(weights_);
}

double LlrEvaluator::operator()(const Vector& observation) const {
  if (observation.size() != weights_.size())
    throw std::invalid_argument("llr: observation has wrong length, expected " +
                                std::to_string(weights_.size()));
  return observation.dot(weights_) - kld_;
}

double llr(const Scenario& s, const SamplingTimes& t, const Vector& observation) {
  return LlrEvaluator(s, t)(observation);
}

SprtState step(const SprtState& state, double llr_value, const Thresholds& th) {
  if (state.status != SprtStatus::Running)
    throw std::logic_error("step: test already decided");
  SprtState next = state;
  next.cumulative_llr += llr_value;
  next.stage += 1;
  if (next.cumulative_llr > th.delta_1) {
    next.status = SprtStatus::DecidedH1;
    next.overshoot = next.cumulative_llr - th.delta_1;
  } else if (next.cumulative_llr < th.delta_0) {
    next.status = SprtStatus::DecidedH0;
    next.overshoot = th.delta_0 - next.cumulative_llr;
  }
  return next;
}

double expected_stopping_time(const SprtConfig& cfg, double kld, Hypothesis hypothesis) {
  if (!(kld > 0.0) || !std::isfinite(kld))
    throw std::domain_error("expected_stopping_time: kld must be positive");
  const Thresholds th = thresholds(cfg);
  if (hypothesis == Hypothesis::H1)
    return (cfg.p_d * th.delta_1 + (1.0 - cfg.p_d) * th.delta_0) / kld;
  return (cfg.p_fa * th.delta_1 + (1.0 - cfg.p_fa) * th.delta_0) / (-kld);
}

StoppingTimeBounds stopping_time_bounds(const SprtConfig& cfg, const Scenario& s) {
  const double kld_upper = upper_bound(s).value;
  const double kld_lower = lower_bound(s);
  StoppingTimeBounds out;
  // stopping time is inversely proportional to the divergence, so the KLD
  // upper bound yields the stopping-time lower bound and vice versa
  out.h0.lower = expected_stopping_time(cfg, kld_upper, Hypothesis::H0);
  out.h0.upper = expected_stopping_time(cfg, kld_lower, Hypothesis::H0);
  out.h1.lower = expected_stopping_time(cfg, kld_upper, Hypothesis::H1);
  out.h1.upper = expected_stopping_time(cfg, kld_lower, Hypothesis::H1);
  return out;
}

}  // namespace asyncsprt
