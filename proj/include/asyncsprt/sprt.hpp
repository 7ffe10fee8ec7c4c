#pragma once

#include "asyncsprt/correlation.hpp"

namespace asyncsprt {

enum class Hypothesis { H0, H1 };
enum class SprtStatus { Running, DecidedH1, DecidedH0 };

// Decision thresholds from the design targets: the test stops for H1 once
// the cumulative LLR exceeds delta_1 = log(p_d / p_fa) and for H0 once it
// falls below delta_0 = log((1 - p_d) / (1 - p_fa)). Nats throughout.
struct Thresholds {
  double delta_1 = 0.0;
  double delta_0 = 0.0;
};

Thresholds thresholds(const SprtConfig& cfg);

// Per-group log-likelihood ratio for one stacked observation [x_1..x_N, x_fc]:
//   llr = x' Sigma^{-1}(t) stilde - (1/2) stilde' Sigma^{-1}(t) stilde.
// The evaluator factors the covariance work out of the per-observation path.
class LlrEvaluator {
 public:
  LlrEvaluator(const Scenario& s, const SamplingTimes& t);

  double operator()(const Vector& observation) const;

  // (1/2) stilde' Sigma^{-1} stilde, the expected LLR under H1
  double kld() const { return kld_; }
  const Vector& weights() const { return weights_; }

 private:
  Vector weights_;  // Sigma^{-1}(t) stilde
  double kld_;
};

double llr(const Scenario& s, const SamplingTimes& t, const Vector& observation);

// Value state of one sequential test. Decisions use strict comparisons, so a
// cumulative LLR equal to a threshold keeps sampling. `overshoot` holds the
// distance past the crossed threshold at decision time, the quantity the
// analytic stopping-time formulas assume negligible.
struct SprtState {
  double cumulative_llr = 0.0;
  int stage = 0;
  SprtStatus status = SprtStatus::Running;
  double overshoot = 0.0;
};

// one group-level update; throws std::logic_error on an already decided state
SprtState step(const SprtState& state, double llr_value, const Thresholds& th);

// Analytic expected number of groups until decision, for a test whose
// per-group KL divergence is `kld`:
//   H1: (p_d delta_1 + (1 - p_d) delta_0) / kld
//   H0: (p_fa delta_1 + (1 - p_fa) delta_0) / (-kld)
double expected_stopping_time(const SprtConfig& cfg, double kld, Hypothesis hypothesis);

// Bracket of the expected stopping time over all sampling-time choices: the
// KLD upper bound gives the fastest test, the lower bound the slowest.
struct StoppingTimeBracket {
  double lower = 0.0;
  double upper = 0.0;
};

struct StoppingTimeBounds {
  StoppingTimeBracket h0;
  StoppingTimeBracket h1;
};

StoppingTimeBounds stopping_time_bounds(const SprtConfig& cfg, const Scenario& s);

}  // namespace asyncsprt
