#include "asyncsprt/optimize.hpp"

#include "asyncsprt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace asyncsprt {

namespace {

constexpr double kArmijo = 1e-4;
constexpr std::int64_t kCertifyBudget = 10'000'000;     // auto-certification cells
constexpr std::int64_t kGridBudget = 1'500'000'000;     // hard grid_oracle refusal

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) < b(j)) return true;
    if (a(j) > b(j)) return false;
  }
  return false;
}

struct LocalResult {
  Vector x;
  double value = 0.0;  // signed objective (sense applied)
  bool converged = false;
};

// Projected gradient ascent on f(t) = sign * K(t) with central finite
// differences and a backtracking (Armijo) line search. Iterates stay in the
// box via clamping; only strictly improving steps are accepted, so the
// objective sequence is monotone.
LocalResult local_ascent(const KldEvaluator& kld, double sign, Vector x,
                         const OptimizerConfig& cfg) {
  const Scenario& sc = kld.scenario();
  const double eps = sc.window;
  const auto n = x.size();
  const double fd_step = 1e-6 * eps;
  const double min_alpha = 1e-18 * eps;

  const auto eval = [&](const Vector& t) { return sign * kld(t); };
  const auto clamp = [&](Vector t) {
    for (Eigen::Index j = 0; j < n; ++j) t(j) = std::clamp(t(j), 0.0, eps);
    return t;
  };

  double fx = eval(x);
  double alpha = eps;  // warm-started trial step, in units of x per unit gradient
  LocalResult res;
  Vector grad(n), probe(n), candidate(n);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // central differences; K extends smoothly past the box so no clamping here
    double grad_norm = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      probe = x;
      probe(j) = x(j) + fd_step;
      const double up = eval(probe);
      probe(j) = x(j) - fd_step;
      const double down = eval(probe);
      grad(j) = (up - down) / (2.0 * fd_step);
      grad_norm = std::max(grad_norm, std::abs(grad(j)));
    }
    if (grad_norm <= 1e-14 * std::max(1.0, std::abs(fx))) {
      res.converged = true;
      break;
    }

    // cap the trial step so the first probe never moves farther than one box width
    double trial = std::min(alpha * 4.0, eps / grad_norm);
    bool accepted = false;
    while (trial >= min_alpha) {
      candidate = clamp(x + trial * grad);
      const double fc = eval(candidate);
      const double directional = grad.dot(candidate - x);
      if (fc > fx && fc >= fx + kArmijo * directional) {
        const double dx = (candidate - x).cwiseAbs().maxCoeff();
        const double df = fc - fx;
        x = candidate;
        fx = fc;
        alpha = trial;
        accepted = true;
        if (dx <= cfg.step_tol * eps && df <= cfg.objective_tol * std::max(1.0, std::abs(fx)))
          res.converged = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      // no improving step along the gradient: stationary within tolerance
      res.converged = true;
      break;
    }
    if (res.converged) break;
  }

  res.x = std::move(x);
  res.value = fx;
  return res;
}

std::vector<Vector> starting_points(const Scenario& s, const OptimizerConfig& cfg) {
  const auto n = s.n_sensors();
  const double eps = s.window;
  std::vector<Vector> starts;

  starts.push_back(Vector::Constant(n, s.t_fc));  // synchronous with the FC

  if (n <= 10) {
    // the extrema of the bound analysis sit at f_j in {f_j(delta_fc), 1},
    // i.e. at corners or on the synchronous slice, so seed every corner
    const std::uint32_t corners = 1u << n;
    for (std::uint32_t mask = 0; mask < corners; ++mask) {
      Vector c(n);
      for (Eigen::Index j = 0; j < n; ++j) c(j) = (mask >> j) & 1u ? eps : 0.0;
      starts.push_back(std::move(c));
    }
  } else {
    starts.push_back(Vector::Zero(n));
    starts.push_back(Vector::Constant(n, eps));
  }

  // Latin hypercube: one stratum permutation per dimension
  const int m = std::max(1, cfg.n_starts);
  Pcg32 rng(cfg.seed, 0x1a7c5);
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(n));
  for (auto& perm : perms) {
    perm.resize(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = m - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[rng.next_below(static_cast<std::uint32_t>(i + 1))]);
  }
  for (int i = 0; i < m; ++i) {
    Vector p(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double u = rng.next_double();
      p(j) = eps * (perms[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] + u) / m;
    }
    starts.push_back(std::move(p));
  }
  return starts;
}

std::int64_t grid_cells(Eigen::Index n, std::int64_t points_per_dim) {
  std::int64_t cells = 1;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (cells > kGridBudget / points_per_dim) return kGridBudget + 1;
    cells *= points_per_dim;
  }
  return cells;
}

Extremum multistart(const Scenario& s, const OptimizerConfig& cfg, Sense sense) {
  const KldEvaluator kld(s);
  if (cfg.n_starts < 1) throw std::invalid_argument("optimizer: n_starts must be >= 1");
  if (!(cfg.step_tol > 0.0) || !(cfg.objective_tol > 0.0))
    throw std::invalid_argument("optimizer: tolerances must be positive");
  const double sign = sense == Sense::Max ? 1.0 : -1.0;

  Extremum best;
  bool have_best = false;
  for (const Vector& start : starting_points(s, cfg)) {
    LocalResult local = local_ascent(kld, sign, start, cfg);
    if (local.converged) ++best.starts_converged;
    const bool better =
        !have_best || local.value > sign * best.value ||
        (local.value == sign * best.value && lex_less(local.x, best.arg));
    if (better) {
      best.value = sign * local.value;
      best.arg = local.x;
      have_best = true;
    }
  }
  best.value = kld(best.arg);  // canonical evaluation at the winner

  if (s.n_sensors() <= 4 && cfg.grid_resolution >= 2) {
    const std::int64_t cells = grid_cells(s.n_sensors(), cfg.grid_resolution + 1);
    if (cells <= kCertifyBudget) {
      const Extremum oracle = grid_oracle(s, cfg.grid_resolution, sense);
      best.is_certified_global =
          std::abs(best.value - oracle.value) <= 1e-3 * std::max(1.0, std::abs(oracle.value));
    }
  }
  return best;
}

}  // namespace

Extremum maximize_kld(const Scenario& s, const OptimizerConfig& cfg) {
  return multistart(s, cfg, Sense::Max);
}

Extremum minimize_kld(const Scenario& s, const OptimizerConfig& cfg) {
  return multistart(s, cfg, Sense::Min);
}

Extremum grid_oracle(const Scenario& s, int resolution, Sense sense) {
  const KldEvaluator kld(s);
  if (resolution < 2) throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  const auto n = s.n_sensors();
  const std::int64_t cells = grid_cells(n, static_cast<std::int64_t>(resolution) + 1);
  if (n > 4 || cells > kGridBudget)
    throw std::invalid_argument(
        "grid_oracle: refusing exhaustive search over ~" + std::to_string(resolution) + "^" +
        std::to_string(n) + " = " +
        (cells > kGridBudget ? ">" + std::to_string(kGridBudget) : std::to_string(cells)) +
        " evaluations; use the multistart optimizer for this size");

  const double eps = s.window;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(resolution) + 1);
  for (int i = 0; i < resolution; ++i)
    pts.push_back(eps * static_cast<double>(i) / (resolution - 1));
  pts.back() = eps;  // exact corner regardless of rounding
  if (std::find(pts.begin(), pts.end(), s.t_fc) == pts.end()) {
    pts.insert(std::upper_bound(pts.begin(), pts.end(), s.t_fc), s.t_fc);
  }
  const auto m = static_cast<Eigen::Index>(pts.size());

  // per-dimension contribution tables: r_j and the two partial-sum terms
  std::vector<std::vector<double>> wtab(static_cast<std::size_t>(n)),
      qtab(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& w = wtab[static_cast<std::size_t>(j)];
    auto& q = qtab[static_cast<std::size_t>(j)];
    w.resize(static_cast<std::size_t>(m));
    q.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double r = kld.correlation_at(j, pts[static_cast<std::size_t>(i)]);
      w[static_cast<std::size_t>(i)] = s.signals(j) * r;
      q[static_cast<std::size_t>(i)] = r * r;
    }
  }

  const double sign = sense == Sense::Max ? 1.0 : -1.0;
  const double base = kld.signal_term();
  const double two_s2 = 2.0 * s.noise_variance;
  const double s_fc = s.signal_fc;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n), 0),
      best_idx(static_cast<std::size_t>(n), 0);

  // lexicographic scan (dimension 0 outermost) with running partial sums, so
  // the first strictly-better cell is the lexicographically smallest optimum
  const auto scan = [&](const auto& self, Eigen::Index dim, double weighted,
                        double sum_sq) -> void {
    const auto& w = wtab[static_cast<std::size_t>(dim)];
    const auto& q = qtab[static_cast<std::size_t>(dim)];
    if (dim == n - 1) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const double num = weighted + w[static_cast<std::size_t>(i)] - s_fc;
        const double den = 1.0 - (sum_sq + q[static_cast<std::size_t>(i)]);
        const double value = sign * (base + num * num / (two_s2 * den));
        if (value > best) {
          best = value;
          idx[static_cast<std::size_t>(dim)] = i;
          best_idx = idx;
        }
      }
    } else {
      for (Eigen::Index i = 0; i < m; ++i) {
        idx[static_cast<std::size_t>(dim)] = i;
        self(self, dim + 1, weighted + w[static_cast<std::size_t>(i)],
             sum_sq + q[static_cast<std::size_t>(i)]);
      }
    }
  };
  scan(scan, 0, 0.0, 0.0);

  Extremum out;
  out.arg = Vector(n);
  for (Eigen::Index j = 0; j < n; ++j)
    out.arg(j) = pts[static_cast<std::size_t>(best_idx[static_cast<std::size_t>(j)])];
  out.value = kld(out.arg);
  out.is_certified_global = true;  // this is the certification reference
  return out;
}

}  // namespace asyncsprt
