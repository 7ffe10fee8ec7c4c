#pragma once

#include "asyncsprt/divergence.hpp"

#include <cstdint>

namespace asyncsprt {

enum class Sense { Max, Min };

struct OptimizerConfig {
  int n_starts = 32;             // Latin-hypercube starting points
  int max_iters = 300;           // projected-gradient iterations per start
  double step_tol = 1e-9;        // on the step infinity-norm, scaled by window
  double objective_tol = 1e-12;  // relative objective change at convergence
  int grid_resolution = 401;     // oracle points per dimension (certification)
  std::uint64_t seed = 0;
};

struct Extremum {
  double value = 0.0;
  SamplingTimes arg;          // where the extremum is attained
  int starts_converged = 0;   // local searches that met the tolerances
  bool is_certified_global = false;  // grid oracle corroborated the value
};

// Best K(t) over the box [0, window]^N from multistart projected gradient
// ascent (finite-difference gradients, backtracking line search). Starting
// points: a Latin hypercube draw, the synchronous point t = t_fc * 1, and all
// box corners when N <= 10. Deterministic for a fixed (scenario, config);
// ties between equal-valued optima resolve to the lexicographically smallest
// argument. When the certification grid is affordable the result is checked
// against grid_oracle at config.grid_resolution.
Extremum maximize_kld(const Scenario& s, const OptimizerConfig& cfg = {});

// mirror image of maximize_kld
Extremum minimize_kld(const Scenario& s, const OptimizerConfig& cfg = {});

// Exhaustive evaluation over the tensor grid of `resolution` uniform points
// per dimension (box corners included) augmented with the t_j = t_fc slice.
// Only sensible for small N: refuses N > 4 or grids beyond the evaluation
// budget, reporting the estimated cost. Ties resolve lexicographically.
Extremum grid_oracle(const Scenario& s, int resolution, Sense sense);

}  // namespace asyncsprt
