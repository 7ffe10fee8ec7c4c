#include "asyncsprt/sprt.hpp"

#include "asyncsprt/divergence.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace asyncsprt;
using testing::ScenarioSampler;

namespace {

Scenario correlated_pair() {
  Scenario s;
  s.signals = Vector::Constant(2, 0.5);
  s.signal_fc = 0.5;
  s.noise_variance = 1.0;
  s.correlations = Vector(2);
  s.correlations << 0.2, -0.2;
  s.kernels.assign(2, CorrelationKernel::squared_exponential());
  s.window = 1.0;
  s.t_fc = 0.0;
  s.sprt = {0.92, 0.1};
  return s;
}

}  // namespace

TEST_CASE("thresholds evaluate Wald's design formulas") {
  const Thresholds th = thresholds({0.92, 0.1});
  CHECK(th.delta_1 == doctest::Approx(2.2192034840549946).epsilon(1e-15));
  CHECK(th.delta_0 == doctest::Approx(-2.4203681286504293).epsilon(1e-15));

  const Thresholds sym = thresholds({0.9, 0.1});
  CHECK(sym.delta_1 == doctest::Approx(2.1972245773362196).epsilon(1e-15));
  CHECK(sym.delta_0 == doctest::Approx(-sym.delta_1).epsilon(1e-12));

  // symmetric limit: both thresholds shrink to zero from the correct side
  const Thresholds tiny = thresholds({0.5 + 1e-6, 0.5 - 1e-6});
  CHECK(tiny.delta_1 > 0.0);
  CHECK(tiny.delta_0 < 0.0);
  CHECK(tiny.delta_1 < 1e-4);
  CHECK(-tiny.delta_0 < 1e-4);

  CHECK_THROWS_AS(thresholds({0.1, 0.92}), std::invalid_argument);
  CHECK_THROWS_AS(thresholds({1.0, 0.1}), std::invalid_argument);
}

TEST_CASE("threshold monotonicity in the design targets") {
  const Thresholds base = thresholds({0.9, 0.1});
  CHECK(thresholds({0.95, 0.1}).delta_1 > base.delta_1);
  const Thresholds tighter_fa = thresholds({0.9, 0.05});
  CHECK(tighter_fa.delta_1 > base.delta_1);
  CHECK(std::abs(tighter_fa.delta_0) > std::abs(base.delta_0));
}

TEST_CASE("llr at canonical observations") {
  const Scenario s = correlated_pair();
  SamplingTimes t(2);
  t << 0.4, 0.9;
  const LlrEvaluator eval(s, t);
  const double k = eval.kld();
  CHECK(k == doctest::Approx(kl_divergence(s, t)).epsilon(1e-10));

  const Vector stilde = s.tilde_signal();
  CHECK(eval(stilde) == doctest::Approx(k).epsilon(1e-12));
  CHECK(eval(Vector::Zero(3)) == doctest::Approx(-k).epsilon(1e-12));
  CHECK(eval(Vector(0.5 * stilde)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(llr(s, t, stilde) == eval(stilde));
  CHECK_THROWS_AS(eval(Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("step applies strict threshold comparisons") {
  const Thresholds th = thresholds({0.92, 0.1});
  SprtState s0;

  const SprtState up = step(s0, 3.0, th);
  CHECK(up.status == SprtStatus::DecidedH1);
  CHECK(up.stage == 1);
  CHECK(up.overshoot == doctest::Approx(3.0 - th.delta_1).epsilon(1e-15));

  const SprtState down = step(s0, -3.0, th);
  CHECK(down.status == SprtStatus::DecidedH0);
  CHECK(down.overshoot == doctest::Approx(th.delta_0 + 3.0).epsilon(1e-12));

  SprtState run = step(s0, 0.0, th);
  CHECK(run.status == SprtStatus::Running);
  run = step(run, 1.0, th);
  CHECK(run.status == SprtStatus::Running);
  CHECK(run.stage == 2);
  CHECK(run.cumulative_llr == 1.0);

  // equality with a threshold keeps sampling
  const SprtState at_edge = step(s0, th.delta_1, th);
  CHECK(at_edge.status == SprtStatus::Running);

  CHECK_THROWS_AS(step(up, 0.1, th), std::logic_error);
}

TEST_CASE("expected stopping time evaluates the Wald formulas") {
  const SprtConfig cfg{0.92, 0.1};
  CHECK(expected_stopping_time(cfg, 0.25, Hypothesis::H0) ==
        doctest::Approx(7.825643869519549).epsilon(1e-14));
  CHECK(expected_stopping_time(cfg, 0.25, Hypothesis::H1) ==
        doctest::Approx(7.392151020154243).epsilon(1e-14));
  CHECK(expected_stopping_time(cfg, 0.25, Hypothesis::H0) > 0.0);

  // inverse proportionality: doubling the divergence halves the time, exactly
  // for power-of-two factors
  const double base = expected_stopping_time(cfg, 0.1, Hypothesis::H1);
  CHECK(expected_stopping_time(cfg, 0.2, Hypothesis::H1) == base / 2.0);
  CHECK(expected_stopping_time(cfg, 0.4, Hypothesis::H1) == base / 4.0);
  CHECK(expected_stopping_time(cfg, 0.3, Hypothesis::H1) ==
        doctest::Approx(base / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(expected_stopping_time(cfg, 0.0, Hypothesis::H0), std::domain_error);
  CHECK_THROWS_AS(expected_stopping_time(cfg, -1.0, Hypothesis::H1), std::domain_error);
}

TEST_CASE("empirical LLR means realize the antisymmetry identity") {
  const Scenario s = correlated_pair();
  SamplingTimes t(2);
  t << 0.3, 0.8;
  const LlrEvaluator eval(s, t);
  const double k = eval.kld();
  const int n = 20000;
  const double stderr_llr = std::sqrt(2.0 * k / n);  // Var(llr) = 2 K exactly

  for (const Hypothesis hyp : {Hypothesis::H1, Hypothesis::H0}) {
    GroupSampler sampler(s, t, hyp);
    GaussianSampler rng{Pcg32(2025, 1)};
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += eval(sampler.draw(rng));
    const double target = hyp == Hypothesis::H1 ? k : -k;
    CHECK(std::abs(sum / n - target) <= 4.0 * stderr_llr);
  }
}

TEST_CASE("stopping-time bounds bracket the attainable Wald times") {
  const Scenario s = correlated_pair();
  const StoppingTimeBounds b = stopping_time_bounds(s.sprt, s);
  CHECK(b.h0.lower <= b.h0.upper);
  CHECK(b.h1.lower <= b.h1.upper);

  ScenarioSampler gen(6161);
  for (int i = 0; i < 200; ++i) {
    const double k = kl_divergence(s, gen.sample_times(s));
    const double t0 = expected_stopping_time(s.sprt, k, Hypothesis::H0);
    const double t1 = expected_stopping_time(s.sprt, k, Hypothesis::H1);
    CHECK(b.h0.lower - 1e-12 <= t0);
    CHECK(t0 <= b.h0.upper + 1e-12);
    CHECK(b.h1.lower - 1e-12 <= t1);
    CHECK(t1 <= b.h1.upper + 1e-12);
  }

  SUBCASE("zero correlation collapses the bracket") {
    Scenario flat = s;
    flat.correlations = Vector::Zero(2);
    const StoppingTimeBounds fb = stopping_time_bounds(flat.sprt, flat);
    CHECK(fb.h0.lower == doctest::Approx(fb.h0.upper).epsilon(1e-14));
    CHECK(fb.h1.lower == doctest::Approx(fb.h1.upper).epsilon(1e-14));
  }

  SUBCASE("more sensors shrink the upper bound in the sweep family") {
    auto family = [](int n) {
      Scenario sc;
      sc.signals = Vector::Constant(n, 0.5);
      sc.signal_fc = 0.5;
      sc.noise_variance = 1.0;
      sc.correlations = Vector(n);
      const double mag = 1.0 / (2.0 * n + 1.0);
      for (int j = 0; j < n; ++j) sc.correlations(j) = j < n - n / 2 ? mag : -mag;
      sc.kernels.assign(static_cast<std::size_t>(n),
                        CorrelationKernel::squared_exponential());
      sc.window = 1.0;
      sc.t_fc = 0.0;
      sc.sprt = {0.92, 0.1};
      return sc;
    };
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {2, 4, 6, 8}) {
      const double ub = stopping_time_bounds({0.92, 0.1}, family(n)).h0.upper;
      CHECK(ub < prev);
      prev = ub;
    }
  }
}
