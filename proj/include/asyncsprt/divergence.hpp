#pragma once

#include "asyncsprt/correlation.hpp"

namespace asyncsprt {

// Sign partition of the sensor indices (0-based). The a-sets split on
// s_j * rho_j, the b-sets on s_fc * s_j * rho_j; indices whose product is
// exactly zero contribute nothing to either bound and are listed in `zeros`.
struct IndexSets {
  std::vector<int> a_plus;
  std::vector<int> a_minus;
  std::vector<int> b_plus;
  std::vector<int> b_minus;
  std::vector<int> zeros;
};

IndexSets partition_indices(const Scenario& s);

// Per-group KL divergence between the H1 and H0 observation laws,
//   K(t) = |s|^2 / (2 sigma^2) + (sum_j s_j r_j(t) - s_fc)^2
//          / (2 sigma^2 (1 - sum_j r_j(t)^2)),
// equal to (1/2) stilde' Sigma^{-1}(t) stilde. Reported in nats.
double kl_divergence(const Scenario& s, const SamplingTimes& t);

// Closed-form upper bound over all sampling times in the box (t_fc fixed):
//   value = |s|^2/(2 sigma^2) + max{(psi_plus - s_fc)^2, (psi_minus - s_fc)^2}
//           / (2 sigma^2 d_eq),  d_eq = 1 - |rho|^2,
// with psi_plus / psi_minus the extremal weighted correlation sums evaluated
// at the worst-case offset delta_fc = max{t_fc, window - t_fc}.
struct UpperBoundReport {
  double value = 0.0;
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double delta_fc = 0.0;
};

UpperBoundReport upper_bound(const Scenario& s);

// Cauchy-Schwarz lower bound over the box:
//   |stilde|^4 / (2 sigma^2) / (|stilde|^2 + 2 s_fc [sum_{b-} s_j rho_j
//   f_j(delta_fc) + sum_{b+} s_j rho_j])
double lower_bound(const Scenario& s);

// Everything about K at one sampling-time vector plus the box-wide bounds.
struct KldReport {
  double exact = 0.0;
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  double delta_fc = 0.0;
  double psi_plus = 0.0;
  double psi_minus = 0.0;
};

KldReport kld_report(const Scenario& s, const SamplingTimes& t);

// Validated-once fast path for optimizers and grids; evaluation is O(N) and
// pure, so one evaluator can be shared across threads.
class KldEvaluator {
 public:
  explicit KldEvaluator(const Scenario& s);

  double operator()(const SamplingTimes& t) const;

  // r_j at a single coordinate; used to precompute per-dimension tables
  double correlation_at(Eigen::Index j, double t_j) const;

  Eigen::Index n_sensors() const { return scenario_.n_sensors(); }
  const Scenario& scenario() const { return scenario_; }
  double signal_term() const { return signal_term_; }

 private:
  Scenario scenario_;
  double signal_term_;     // |s|^2 / (2 sigma^2)
  double two_sigma_sq_;
};

}  // namespace asyncsprt
