#include "asyncsprt/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace asyncsprt {

namespace {

bool finite(double x) { return std::isfinite(x); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

CorrelationKernel CorrelationKernel::exponential(double length_scale) {
  if (!(length_scale > 0.0) || !finite(length_scale))
    throw std::invalid_argument("exponential kernel: length scale must be positive");
  return CorrelationKernel(KernelKind::Exponential, length_scale);
}

CorrelationKernel CorrelationKernel::squared_exponential(double length_scale) {
  if (!(length_scale > 0.0) || !finite(length_scale))
    throw std::invalid_argument("squared-exponential kernel: length scale must be positive");
  return CorrelationKernel(KernelKind::SquaredExponential, length_scale);
}

CorrelationKernel CorrelationKernel::tabulated(std::vector<double> distances,
                                               std::vector<double> values) {
  if (distances.size() != values.size())
    throw std::invalid_argument("tabulated kernel: distance and value lists differ in length");
  if (distances.size() < 2)
    throw std::invalid_argument("tabulated kernel: need at least two knots");
  if (distances.front() != 0.0 || values.front() != 1.0)
    throw std::invalid_argument("tabulated kernel: table must start at (0, 1)");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (!finite(distances[i]) || !finite(values[i]))
      throw std::invalid_argument("tabulated kernel: non-finite knot");
    if (!(values[i] > 0.0) || values[i] > 1.0)
      throw std::invalid_argument("tabulated kernel: values must lie in (0, 1]");
    if (i > 0) {
      if (!(distances[i] > distances[i - 1]))
        throw std::invalid_argument("tabulated kernel: distances must be strictly increasing");
      if (!(values[i] < values[i - 1]))
        throw std::invalid_argument("tabulated kernel: values must be strictly decreasing");
    }
  }
  CorrelationKernel k(KernelKind::Tabulated, 1.0);
  k.knot_d_ = std::move(distances);
  k.knot_f_ = std::move(values);
  return k;
}

double CorrelationKernel::operator()(double distance) const {
  if (std::isnan(distance) || distance < 0.0)
    throw std::domain_error("correlation kernel: distance must be nonnegative");
  switch (kind_) {
    case KernelKind::Exponential:
      return std::exp(-distance / length_scale_);
    case KernelKind::SquaredExponential: {
      const double u = distance / length_scale_;
      return std::exp(-u * u);
    }
    case KernelKind::Tabulated: {
      if (distance >= knot_d_.back()) return knot_f_.back();
      const auto it = std::upper_bound(knot_d_.begin(), knot_d_.end(), distance);
      const auto hi = static_cast<std::size_t>(it - knot_d_.begin());
      const std::size_t lo = hi - 1;
      const double w = (distance - knot_d_[lo]) / (knot_d_[hi] - knot_d_[lo]);
      return knot_f_[lo] + w * (knot_f_[hi] - knot_f_[lo]);
    }
  }
  throw std::logic_error("correlation kernel: unknown kind");
}

double CorrelationKernel::covered_distance() const {
  if (kind_ == KernelKind::Tabulated) return knot_d_.back();
  return std::numeric_limits<double>::infinity();
}

void CorrelationKernel::describe_violations(const std::string& label, double reach,
                                            std::vector<std::string>& out) const {
  if (kind_ != KernelKind::Tabulated) {
    if (!(length_scale_ > 0.0))
      out.push_back(label + ": length scale must be positive");
    return;
  }
  // construction already enforced the table shape; here only the coverage of
  // the scenario's reachable offsets can fail
  if (knot_d_.back() < reach)
    out.push_back(label + ": table covers distances up to " + fmt(knot_d_.back()) +
                  " but offsets up to " + fmt(reach) + " are reachable");
}

Vector Scenario::tilde_signal() const {
  Vector out(signals.size() + 1);
  out.head(signals.size()) = signals;
  out(signals.size()) = signal_fc;
  return out;
}

std::string ValidationResult::to_string() const {
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v;
  }
  return s;
}

ValidationResult validate_scenario(const Scenario& s) {
  ValidationResult r;
  const auto n = s.signals.size();
  if (n < 1) r.violations.push_back("signals: need at least one sensor");
  if (s.correlations.size() != n)
    r.violations.push_back("correlations: expected " + std::to_string(n) + " entries, got " +
                           std::to_string(s.correlations.size()));
  if (static_cast<Eigen::Index>(s.kernels.size()) != n)
    r.violations.push_back("kernels: expected " + std::to_string(n) + " entries, got " +
                           std::to_string(s.kernels.size()));
  for (Eigen::Index j = 0; j < n; ++j)
    if (!finite(s.signals(j))) {
      r.violations.push_back("signals: entries must be finite");
      break;
    }
  if (!finite(s.signal_fc)) r.violations.push_back("signal_fc: must be finite");
  if (!(s.noise_variance > 0.0) || !finite(s.noise_variance))
    r.violations.push_back("noise_variance: must be positive, got " + fmt(s.noise_variance));
  if (!(s.window > 0.0) || !finite(s.window))
    r.violations.push_back("window: must be positive, got " + fmt(s.window));
  if (!finite(s.t_fc) || s.t_fc < 0.0 || s.t_fc > s.window)
    r.violations.push_back("t_fc: must lie in [0, " + fmt(s.window) + "], got " + fmt(s.t_fc));

  if (s.correlations.size() == n && n >= 1) {
    double sum_sq = 0.0;
    bool bad_entry = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double rho = s.correlations(j);
      if (!finite(rho) || std::abs(rho) >= 1.0) bad_entry = true;
      sum_sq += rho * rho;
    }
    if (bad_entry)
      r.violations.push_back("correlations: every entry must be finite with |rho| < 1");
    if (!(sum_sq < 1.0 - kFeasibilityMargin))
      r.violations.push_back(
          "correlations: sum of squares " + fmt(sum_sq) +
          " must stay below 1; the synchronous covariance is not positive definite");
  }

  if (static_cast<Eigen::Index>(s.kernels.size()) == n && finite(s.t_fc) && finite(s.window) &&
      s.window > 0.0) {
    const double reach = s.max_offset();
    for (Eigen::Index j = 0; j < n; ++j)
      s.kernels[static_cast<std::size_t>(j)].describe_violations(
          "kernels[" + std::to_string(j) + "]", reach, r.violations);
  }

  if (!(s.sprt.p_fa > 0.0 && s.sprt.p_fa < s.sprt.p_d && s.sprt.p_d < 1.0))
    r.violations.push_back("sprt: need 0 < p_fa < p_d < 1, got p_d=" + fmt(s.sprt.p_d) +
                           " p_fa=" + fmt(s.sprt.p_fa));
  return r;
}

void require_valid(const Scenario& s) {
  const ValidationResult r = validate_scenario(s);
  if (!r.ok()) throw std::invalid_argument("invalid scenario: " + r.to_string());
}

bool in_box(const Scenario& s, const SamplingTimes& t) {
  if (t.size() != s.n_sensors()) return false;
  for (Eigen::Index j = 0; j < t.size(); ++j)
    if (!(t(j) >= 0.0 && t(j) <= s.window)) return false;
  return true;
}

Vector fc_correlations(const Scenario& s, const SamplingTimes& t) {
  const auto n = s.n_sensors();
  Vector r(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double rho = s.correlations(j);
    r(j) = rho == 0.0 ? 0.0
                      : rho * s.kernels[static_cast<std::size_t>(j)](std::abs(s.t_fc - t(j)));
  }
  return r;
}

CovarianceMatrix build_covariance(const Scenario& s, const SamplingTimes& t) {
  require_valid(s);
  if (!in_box(s, t))
    throw std::invalid_argument("sampling times: need one entry per sensor inside [0, window]");

  const auto n = s.n_sensors();
  CovarianceMatrix c;
  c.noise_variance = s.noise_variance;
  c.r_fc = fc_correlations(s, t);
  double sum_sq = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) sum_sq += c.r_fc(j) * c.r_fc(j);
  c.d_fc = 1.0 - sum_sq;
  // Schur condition sum(rho_j^2 f_j^2) < 1; guaranteed by validation since
  // f <= 1, so a failure here means a kernel broke its contract
  if (!(c.d_fc > 0.0))
    throw std::logic_error("covariance: Schur condition violated, d_fc = " + fmt(c.d_fc));

  c.matrix = Matrix::Zero(n + 1, n + 1);
  const double s2 = s.noise_variance;
  for (Eigen::Index j = 0; j < n; ++j) {
    c.matrix(j, j) = s2;
    const double off = s2 * c.r_fc(j);
    c.matrix(j, n) = off;
    c.matrix(n, j) = off;
  }
  c.matrix(n, n) = s2;
  return c;
}

Matrix block_inverse(const CovarianceMatrix& c) {
  if (!(c.d_fc > kSingularTolerance))
    throw std::runtime_error("block_inverse: covariance numerically singular, d_fc = " +
                             fmt(c.d_fc));
  const auto n = c.r_fc.size();
  const double inv_s2 = 1.0 / c.noise_variance;
  const double inv_d = 1.0 / c.d_fc;
  Matrix inv(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = ((i == j ? 1.0 : 0.0) + c.r_fc(i) * c.r_fc(j) * inv_d) * inv_s2;
      inv(i, j) = v;
      inv(j, i) = v;
    }
    const double off = -c.r_fc(i) * inv_d * inv_s2;
    inv(i, n) = off;
    inv(n, i) = off;
  }
  inv(n, n) = inv_d * inv_s2;
  return inv;
}

}  // namespace asyncsprt
