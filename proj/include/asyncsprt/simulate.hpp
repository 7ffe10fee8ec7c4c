#pragma once

#include "asyncsprt/rng.hpp"
#include "asyncsprt/sprt.hpp"

#include <string>

namespace asyncsprt {

struct McConfig {
  int n_trials = 10000;
  std::uint64_t seed = 0;
  int max_stages = 1'000'000;  // truncation cap for runaway chains
  Hypothesis hypothesis = Hypothesis::H0;
};

struct StoppingTimeEstimate {
  double mean_stages = 0.0;        // over completed (non-truncated) trials
  double std_error = 0.0;
  double decided_h1_fraction = 0.0;  // empirical P_D under H1, P_FA under H0
  double truncated_fraction = 0.0;   // trials that hit max_stages undecided
  double mean_overshoot = 0.0;       // past the crossed threshold, nats
  int n_trials = 0;
  std::string rng_algorithm;         // generator recorded for reproducibility
};

// Draws one stacked group [x_1..x_N, x_fc] ~ N(mean, Sigma(t)) with mean
// stilde under H1 and 0 under H0. The Cholesky factor is computed once per
// (scenario, t) and reused across draws.
class GroupSampler {
 public:
  GroupSampler(const Scenario& s, const SamplingTimes& t, Hypothesis hypothesis);

  Vector draw(GaussianSampler& rng) const;
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  Matrix chol_;  // lower-triangular factor of Sigma(t)
};

// single draw; groups for different stages/trials are independent
Vector draw_group(const Scenario& s, const SamplingTimes& t, Hypothesis hypothesis,
                  GaussianSampler& rng);

// Runs cfg.n_trials independent SPRTs to decision (or truncation) and
// aggregates stage counts, decision fractions, and overshoot. Trial i draws
// from stream i of cfg.seed, so results are reproducible and independent of
// any execution order.
StoppingTimeEstimate run_sprt_trials(const Scenario& s, const SamplingTimes& t,
                                     const McConfig& cfg);

// Sample mean of the per-group LLR under cfg.hypothesis: estimates +K under
// H1 and -K under H0.
double empirical_kld(const Scenario& s, const SamplingTimes& t, const McConfig& cfg);

}  // namespace asyncsprt
