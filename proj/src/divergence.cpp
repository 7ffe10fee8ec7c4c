#include "asyncsprt/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncsprt {

IndexSets partition_indices(const Scenario& s) {
  IndexSets sets;
  const auto n = s.n_sensors();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = s.signals(j) * s.correlations(j);
    const double b = s.signal_fc * a;
    if (a > 0.0)
      sets.a_plus.push_back(static_cast<int>(j));
    else if (a < 0.0)
      sets.a_minus.push_back(static_cast<int>(j));
    if (b > 0.0)
      sets.b_plus.push_back(static_cast<int>(j));
    else if (b < 0.0)
      sets.b_minus.push_back(static_cast<int>(j));
    if (b == 0.0) sets.zeros.push_back(static_cast<int>(j));
  }
  return sets;
}

KldEvaluator::KldEvaluator(const Scenario& s) : scenario_(s) {
  require_valid(s);
  double ss = 0.0;
  for (Eigen::Index j = 0; j < s.n_sensors(); ++j) ss += s.signals(j) * s.signals(j);
  two_sigma_sq_ = 2.0 * s.noise_variance;
  signal_term_ = ss / two_sigma_sq_;
}

double KldEvaluator::correlation_at(Eigen::Index j, double t_j) const {
  const double rho = scenario_.correlations(j);
  if (rho == 0.0) return 0.0;
  return rho * scenario_.kernels[static_cast<std::size_t>(j)](std::abs(scenario_.t_fc - t_j));
}

double KldEvaluator::operator()(const SamplingTimes& t) const {
  const auto n = scenario_.n_sensors();
  if (t.size() != n)
    throw std::invalid_argument("kl_divergence: sampling-time vector has wrong length");
  double weighted = 0.0;   // sum_j s_j r_j
  double sum_sq = 0.0;     // sum_j r_j^2
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = correlation_at(j, t(j));
    weighted += scenario_.signals(j) * r;
    sum_sq += r * r;
  }
  const double denom = 1.0 - sum_sq;
  // impossible for a validated scenario; a nonpositive value means a kernel
  // returned something outside (0, 1]
  if (!(denom > 0.0))
    throw std::logic_error("kl_divergence: correlation denominator not positive");
  const double num = weighted - scenario_.signal_fc;
  return signal_term_ + num * num / (two_sigma_sq_ * denom);
}

double kl_divergence(const Scenario& s, const SamplingTimes& t) {
  const KldEvaluator eval(s);
  if (!in_box(s, t))
    throw std::invalid_argument("kl_divergence: sampling times outside [0, window]");
  return eval(t);
}

UpperBoundReport upper_bound(const Scenario& s) {
  require_valid(s);
  UpperBoundReport rep;
  rep.delta_fc = s.max_offset();
  double rho_sq = 0.0;
  for (Eigen::Index j = 0; j < s.n_sensors(); ++j) {
    const double a = s.signals(j) * s.correlations(j);
    rho_sq += s.correlations(j) * s.correlations(j);
    if (a == 0.0) continue;
    const double f = s.kernels[static_cast<std::size_t>(j)](rep.delta_fc);
    if (a > 0.0) {
      rep.psi_plus += a;
      rep.psi_minus += a * f;
    } else {
      rep.psi_plus += a * f;
      rep.psi_minus += a;
    }
  }
  const double d_eq = 1.0 - rho_sq;
  const double dev_plus = rep.psi_plus - s.signal_fc;
  const double dev_minus = rep.psi_minus - s.signal_fc;
  const double worst = std::max(dev_plus * dev_plus, dev_minus * dev_minus);
  double ss = 0.0;
  for (Eigen::Index j = 0; j < s.n_sensors(); ++j) ss += s.signals(j) * s.signals(j);
  rep.value = ss / (2.0 * s.noise_variance) + worst / (2.0 * s.noise_variance * d_eq);
  return rep;
}

double lower_bound(const Scenario& s) {
  require_valid(s);
  const double delta = s.max_offset();
  double ss_tilde = s.signal_fc * s.signal_fc;
  for (Eigen::Index j = 0; j < s.n_sensors(); ++j) ss_tilde += s.signals(j) * s.signals(j);
  if (ss_tilde == 0.0) return 0.0;  // degenerate zero signal: K is identically zero

  double corr = 0.0;  // sum_{b-} s_j rho_j f_j(delta) + sum_{b+} s_j rho_j
  for (Eigen::Index j = 0; j < s.n_sensors(); ++j) {
    const double a = s.signals(j) * s.correlations(j);
    const double b = s.signal_fc * a;
    if (b > 0.0)
      corr += a;
    else if (b < 0.0)
      corr += a * s.kernels[static_cast<std::size_t>(j)](delta);
  }
  const double denom = ss_tilde + 2.0 * s.signal_fc * corr;
  // the worst-case quadratic form stilde' Sigma stilde / sigma^2 is positive
  // for every positive-definite covariance, so this can only trip if the
  // feasibility gate was bypassed
  if (!(denom > 0.0))
    throw std::logic_error("lower_bound: nonpositive denominator, covariance not valid");
  return ss_tilde * ss_tilde / (2.0 * s.noise_variance) / denom;
}

KldReport kld_report(const Scenario& s, const SamplingTimes& t) {
  KldReport rep;
  const UpperBoundReport ub = upper_bound(s);
  rep.exact = kl_divergence(s, t);
  rep.upper_bound = ub.value;
  rep.lower_bound = lower_bound(s);
  rep.delta_fc = ub.delta_fc;
  rep.psi_plus = ub.psi_plus;
  rep.psi_minus = ub.psi_minus;
  return rep;
}

}  // namespace asyncsprt
