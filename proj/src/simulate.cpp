#include "asyncsprt/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncsprt {

namespace {

void check_config(const McConfig& cfg) {
  if (cfg.n_trials < 1) throw std::invalid_argument("monte carlo: n_trials must be >= 1");
  if (cfg.max_stages < 1) throw std::invalid_argument("monte carlo: max_stages must be >= 1");
}

}  // namespace

GroupSampler::GroupSampler(const Scenario& s, const SamplingTimes& t, Hypothesis hypothesis) {
  const CovarianceMatrix cov = build_covariance(s, t);
  Eigen::LLT<Matrix> llt(cov.matrix);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "group sampler: covariance factorization failed; matrix not positive definite");
  chol_ = llt.matrixL();
  mean_ = hypothesis == Hypothesis::H1 ? s.tilde_signal() : Vector::Zero(cov.matrix.rows());
}

Vector GroupSampler::draw(GaussianSampler& rng) const {
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.next();
  return mean_ + chol_ * z;
}

Vector draw_group(const Scenario& s, const SamplingTimes& t, Hypothesis hypothesis,
                  GaussianSampler& rng) {
  return GroupSampler(s, t, hypothesis).draw(rng);
}

StoppingTimeEstimate run_sprt_trials(const Scenario& s, const SamplingTimes& t,
                                     const McConfig& cfg) {
  check_config(cfg);
  const GroupSampler sampler(s, t, cfg.hypothesis);
  const LlrEvaluator llr_of(s, t);
  const Thresholds th = thresholds(s.sprt);

  std::int64_t completed = 0, truncated = 0, decided_h1 = 0;
  double sum_stages = 0.0, sum_stages_sq = 0.0, sum_overshoot = 0.0;

  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    GaussianSampler rng{Pcg32(cfg.seed, static_cast<std::uint64_t>(trial))};
    SprtState state;
    while (state.status == SprtStatus::Running && state.stage < cfg.max_stages)
      state = step(state, llr_of(sampler.draw(rng)), th);

    if (state.status == SprtStatus::Running) {
      ++truncated;  // excluded from the stage statistics, reported separately
      continue;
    }
    ++completed;
    const double stages = state.stage;
    sum_stages += stages;
    sum_stages_sq += stages * stages;
    sum_overshoot += state.overshoot;
    if (state.status == SprtStatus::DecidedH1) ++decided_h1;
  }

  StoppingTimeEstimate est;
  est.n_trials = cfg.n_trials;
  est.rng_algorithm = kRngAlgorithm;
  est.truncated_fraction = static_cast<double>(truncated) / cfg.n_trials;
  if (completed > 0) {
    est.mean_stages = sum_stages / static_cast<double>(completed);
    est.decided_h1_fraction = static_cast<double>(decided_h1) / static_cast<double>(completed);
    est.mean_overshoot = sum_overshoot / static_cast<double>(completed);
    if (completed > 1) {
      const double var =
          (sum_stages_sq - static_cast<double>(completed) * est.mean_stages * est.mean_stages) /
          static_cast<double>(completed - 1);
      est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(completed));
    }
  }
  return est;
}

double empirical_kld(const Scenario& s, const SamplingTimes& t, const McConfig& cfg) {
  check_config(cfg);
  const GroupSampler sampler(s, t, cfg.hypothesis);
  const LlrEvaluator llr_of(s, t);
  double sum = 0.0;
  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    GaussianSampler rng{Pcg32(cfg.seed, static_cast<std::uint64_t>(trial))};
    sum += llr_of(sampler.draw(rng));
  }
  return sum / cfg.n_trials;
}

}  // namespace asyncsprt
