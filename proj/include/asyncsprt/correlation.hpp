#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace asyncsprt {

using Vector = Eigen::VectorXd;
// dense row-major storage throughout; N stays small enough that the
// arrowhead structure is only exploited analytically
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sampling offsets within one window, one entry per sensor, each in [0, window].
using SamplingTimes = Vector;

enum class KernelKind { Exponential, SquaredExponential, Tabulated };

// Pairwise correlation decay f(d) between the fusion-center sample and a
// sensor sample taken d time units apart. Every kernel satisfies f(0) = 1,
// 0 < f <= 1, and f strictly decreasing where defined.
class CorrelationKernel {
 public:
  CorrelationKernel() : CorrelationKernel(KernelKind::SquaredExponential, 1.0) {}

  // f(d) = exp(-d / length_scale)
  static CorrelationKernel exponential(double length_scale = 1.0);
  // f(d) = exp(-(d / length_scale)^2)
  static CorrelationKernel squared_exponential(double length_scale = 1.0);
  // piecewise-linear interpolation of a strictly decreasing table starting at
  // (0, 1); evaluation clamps to the last value beyond the final knot
  static CorrelationKernel tabulated(std::vector<double> distances,
                                     std::vector<double> values);

  // evaluate f(distance); throws std::domain_error for negative distances
  double operator()(double distance) const;

  KernelKind kind() const { return kind_; }
  double length_scale() const { return length_scale_; }
  const std::vector<double>& knot_distances() const { return knot_d_; }
  const std::vector<double>& knot_values() const { return knot_f_; }

  // largest distance with an exact (non-clamped) value; +inf for closed forms
  double covered_distance() const;

  // appends human-readable violations; `reach` is the largest distance the
  // owning scenario can ask for
  void describe_violations(const std::string& label, double reach,
                           std::vector<std::string>& out) const;

 private:
  CorrelationKernel(KernelKind kind, double length_scale)
      : kind_(kind), length_scale_(length_scale) {}

  KernelKind kind_;
  double length_scale_ = 1.0;
  std::vector<double> knot_d_;
  std::vector<double> knot_f_;
};

// SPRT design point: target detection and false-alarm probabilities.
struct SprtConfig {
  double p_d = 0.92;
  double p_fa = 0.1;
};

// One complete problem instance: N sensors plus the fusion center, their
// signals under H1, synchronous correlations, per-sensor decay kernels, the
// sampling window, and the SPRT design targets.
struct Scenario {
  Vector signals;                           // s_j, one per sensor
  double signal_fc = 0.0;                   // s_fc
  double noise_variance = 1.0;              // sigma^2, common to all nodes
  Vector correlations;                      // rho_j, synchronous correlation with the FC
  std::vector<CorrelationKernel> kernels;   // f_j, one per sensor
  double window = 1.0;                      // epsilon
  double t_fc = 0.0;                        // FC sampling offset in [0, window]
  SprtConfig sprt;

  Eigen::Index n_sensors() const { return signals.size(); }

  // largest sensor-to-FC time offset reachable inside the window
  double max_offset() const { return std::max(t_fc, window - t_fc); }

  // stacked signal [s; s_fc]
  Vector tilde_signal() const;
};

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Total function: collects every violated invariant instead of throwing.
// A scenario is feasible when sum(rho^2) stays strictly below 1 (which keeps
// every reachable covariance positive definite), variances and window are
// positive, t_fc lies in the window, kernels are well formed, and the SPRT
// design point is proper.
ValidationResult validate_scenario(const Scenario& s);

// throws std::invalid_argument listing all violations
void require_valid(const Scenario& s);

// true iff t has one entry per sensor and every entry lies in [0, window]
bool in_box(const Scenario& s, const SamplingTimes& t);

// scenarios with sum(rho^2) >= 1 - kFeasibilityMargin are rejected so that
// 1 - |r|^2 stays bounded away from zero everywhere in the box
inline constexpr double kFeasibilityMargin = 1e-9;

// d_fc at or below this is treated as singular by block_inverse
inline constexpr double kSingularTolerance = 1e-12;

// Arrowhead covariance of the stacked sample [x_1 .. x_N, x_fc]:
// sigma^2 * [[I_N, r], [r^T, 1]] with r_j = rho_j f_j(|t_fc - t_j|).
struct CovarianceMatrix {
  Matrix matrix;          // (N+1) x (N+1), sensor block first, FC last
  Vector r_fc;            // pairwise FC correlations r_j(t)
  double d_fc = 1.0;      // Schur complement 1 - |r_fc|^2
  double noise_variance = 1.0;
};

// r_j(t) = rho_j f_j(|t_fc - t_j|); exactly zero whenever rho_j is zero
Vector fc_correlations(const Scenario& s, const SamplingTimes& t);

// builds the covariance above; rejects invalid scenarios and out-of-box t
CovarianceMatrix build_covariance(const Scenario& s, const SamplingTimes& t);

// analytic inverse of the arrowhead covariance:
//   (1/sigma^2) [[I_N + r r^T / d_fc, -r / d_fc], [-r^T / d_fc, 1 / d_fc]]
// throws std::runtime_error when d_fc <= kSingularTolerance
Matrix block_inverse(const CovarianceMatrix& c);

}  // namespace asyncsprt
