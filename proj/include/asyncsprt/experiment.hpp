#pragma once

#include "asyncsprt/config.hpp"
#include "asyncsprt/optimize.hpp"
#include "asyncsprt/simulate.hpp"

#include <stdexcept>

namespace asyncsprt {

// Manifest loading or sweep-validation failure; the message carries the
// offending field path or sweep-point key.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  Fig2SweepSensors,  // sweep the sensor count, correlations +-1/(2N+1)
  Fig3SweepTfc,      // sweep t_fc across [0, window] for several windows
  SinglePoint,
  McValidation,      // single point plus Monte Carlo at the optimal times
};

// Kernel description as written in a manifest; applied to every sensor.
struct KernelSpec {
  KernelKind kind = KernelKind::SquaredExponential;
  double length_scale = 1.0;
  std::vector<double> distances;  // tabulated only
  std::vector<double> values;

  CorrelationKernel build() const;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::SinglePoint;

  // scenario template; fig2 broadcasts `signal` to every sensor while the
  // other kinds take explicit per-sensor vectors
  std::vector<double> signals;
  std::vector<double> correlations;
  bool broadcast_signal = false;
  double signal = 0.0;
  double signal_fc = 0.0;
  double noise_variance = 1.0;
  double window = 1.0;
  double t_fc = 0.0;
  KernelSpec kernel;
  SprtConfig sprt;

  // sweep parameters
  std::vector<int> sweep_sensors;    // fig2
  std::vector<double> sweep_windows; // fig3
  int tfc_points = 41;               // fig3 grid size over [0, window]

  OptimizerConfig optimizer;
  int mc_trials = 0;                 // 0 disables Monte Carlo attachment
  int mc_max_stages = 1'000'000;
  Hypothesis hypothesis = Hypothesis::H0;  // stopping times reported under this
  std::uint64_t seed = 0;
  std::string output_path = "results.csv";
};

ExperimentSpec parse_spec(const config::Table& manifest);
ExperimentSpec load_spec(const std::string& path);

struct SweepPoint {
  std::string key;
  Scenario scenario;
};

// instantiates and validates the scenario at every sweep coordinate
std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec);

struct ResultRow {
  std::string sweep_key;
  int n_sensors = 0;
  double eps = 0.0;
  double t_fc = 0.0;
  double kld_min = 0.0, kld_max = 0.0;
  double bound_lower = 0.0, bound_upper = 0.0;
  // stopping-time translations under the configured hypothesis; the KLD
  // upper bound maps to stop_lb and the lower bound to stop_ub
  double stop_min = 0.0, stop_max = 0.0;
  double stop_lb = 0.0, stop_ub = 0.0;
  bool has_mc = false;
  double mc_mean = 0.0, mc_stderr = 0.0, mc_pfa_or_pd = 0.0;
  std::string error;  // nonempty when this sweep point failed; numbers are NaN
};

// Computes bounds, optimized extrema, and stopping-time translations for
// every sweep point (Monte Carlo at the maximizing times when enabled).
// Points run concurrently; rows come back in sweep order and are
// deterministic for a fixed spec and seed. Per-point failures are recorded
// on the row and do not abort the run.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

// shortest round-trip decimal representation
std::string format_double(double x);

std::string to_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

// companion matplotlib stub for a written CSV
std::string plot_stub(const std::string& csv_filename);

inline constexpr const char* kCsvHeader =
    "sweep_key,n_sensors,eps,t_fc,kld_min,kld_max,bound_lower,bound_upper,"
    "stop_min,stop_max,stop_lb,stop_ub,mc_mean,mc_stderr,mc_pfa_or_pd";

}  // namespace asyncsprt
