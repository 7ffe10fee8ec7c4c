#include "asyncsprt/experiment.hpp"

#include "asyncsprt/rng.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

namespace asyncsprt {

namespace cfg = ::asyncsprt::config;

CorrelationKernel KernelSpec::build() const {
  switch (kind) {
    case KernelKind::Exponential:
      return CorrelationKernel::exponential(length_scale);
    case KernelKind::SquaredExponential:
      return CorrelationKernel::squared_exponential(length_scale);
    case KernelKind::Tabulated:
      return CorrelationKernel::tabulated(distances, values);
  }
  throw SpecError("scenario.kernel.kind: unknown kernel kind");
}

namespace {

ExperimentKind parse_kind(const std::string& text) {
  if (text == "fig2_sweep_sensors") return ExperimentKind::Fig2SweepSensors;
  if (text == "fig3_sweep_tfc") return ExperimentKind::Fig3SweepTfc;
  if (text == "single_point") return ExperimentKind::SinglePoint;
  if (text == "mc_validation") return ExperimentKind::McValidation;
  throw SpecError(
      "kind: expected one of fig2_sweep_sensors, fig3_sweep_tfc, single_point, "
      "mc_validation; got \"" +
      text + "\"");
}

KernelSpec parse_kernel(const cfg::Table& manifest) {
  KernelSpec spec;
  const std::string kind = cfg::get_string(manifest, "scenario.kernel.kind", "squared_exponential");
  if (kind == "exponential")
    spec.kind = KernelKind::Exponential;
  else if (kind == "squared_exponential")
    spec.kind = KernelKind::SquaredExponential;
  else if (kind == "tabulated")
    spec.kind = KernelKind::Tabulated;
  else
    throw SpecError(
        "scenario.kernel.kind: expected exponential, squared_exponential, or tabulated; got \"" +
        kind + "\"");
  if (spec.kind == KernelKind::Tabulated) {
    spec.distances = cfg::require_double_array(manifest, "scenario.kernel.distances");
    spec.values = cfg::require_double_array(manifest, "scenario.kernel.values");
  } else {
    spec.length_scale = cfg::get_double(manifest, "scenario.kernel.length_scale", 1.0);
  }
  try {
    spec.build();
  } catch (const std::exception& e) {
    throw SpecError(std::string("scenario.kernel: ") + e.what());
  }
  return spec;
}

Hypothesis parse_hypothesis(const std::string& text, const std::string& path) {
  if (text == "h0" || text == "H0") return Hypothesis::H0;
  if (text == "h1" || text == "H1") return Hypothesis::H1;
  throw SpecError(path + ": expected \"h0\" or \"h1\", got \"" + text + "\"");
}

Scenario make_scenario(const ExperimentSpec& spec, const std::vector<double>& signals,
                       const std::vector<double>& correlations, double window, double t_fc) {
  Scenario s;
  s.signals = Eigen::Map<const Vector>(signals.data(), static_cast<Eigen::Index>(signals.size()));
  s.correlations = Eigen::Map<const Vector>(correlations.data(),
                                            static_cast<Eigen::Index>(correlations.size()));
  s.signal_fc = spec.signal_fc;
  s.noise_variance = spec.noise_variance;
  s.window = window;
  s.t_fc = t_fc;
  s.sprt = spec.sprt;
  s.kernels.assign(signals.size(), spec.kernel.build());
  return s;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

ResultRow compute_row(const ExperimentSpec& spec, const SweepPoint& point, std::size_t index) {
  ResultRow row;
  row.sweep_key = point.key;
  row.n_sensors = static_cast<int>(point.scenario.n_sensors());
  row.eps = point.scenario.window;
  row.t_fc = point.scenario.t_fc;
  try {
    const Scenario& sc = point.scenario;
    row.bound_upper = upper_bound(sc).value;
    row.bound_lower = lower_bound(sc);

    OptimizerConfig opt = spec.optimizer;
    opt.seed = mix_seed(spec.seed, 2 * index);
    const Extremum max_ext = maximize_kld(sc, opt);
    const Extremum min_ext = minimize_kld(sc, opt);
    row.kld_max = max_ext.value;
    row.kld_min = min_ext.value;

    const auto stop = [&](double kld) {
      return expected_stopping_time(sc.sprt, kld, spec.hypothesis);
    };
    row.stop_min = stop(row.kld_max);
    row.stop_max = stop(row.kld_min);
    row.stop_lb = stop(row.bound_upper);
    row.stop_ub = stop(row.bound_lower);

    if (spec.mc_trials > 0) {
      McConfig mc;
      mc.n_trials = spec.mc_trials;
      mc.max_stages = spec.mc_max_stages;
      mc.hypothesis = spec.hypothesis;
      mc.seed = mix_seed(spec.seed, 2 * index + 1);
      const StoppingTimeEstimate est = run_sprt_trials(sc, max_ext.arg, mc);
      row.has_mc = true;
      row.mc_mean = est.mean_stages;
      row.mc_stderr = est.std_error;
      row.mc_pfa_or_pd = est.decided_h1_fraction;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
    row.kld_min = row.kld_max = row.bound_lower = row.bound_upper = nan();
    row.stop_min = row.stop_max = row.stop_lb = row.stop_ub = nan();
    row.has_mc = false;
  }
  return row;
}

}  // namespace

ExperimentSpec parse_spec(const cfg::Table& manifest) {
  ExperimentSpec spec;
  try {
    spec.kind = parse_kind(cfg::require_string(manifest, "kind"));

    spec.signal_fc = cfg::require_double(manifest, "scenario.signal_fc");
    spec.noise_variance = cfg::require_double(manifest, "scenario.noise_variance");
    spec.kernel = parse_kernel(manifest);
    spec.sprt.p_d = cfg::require_double(manifest, "sprt.p_d");
    spec.sprt.p_fa = cfg::require_double(manifest, "sprt.p_fa");

    if (const cfg::Value* v = cfg::find(manifest, "scenario.signal")) {
      spec.broadcast_signal = true;
      spec.signal = v->as_double("scenario.signal");
    }
    if (cfg::find(manifest, "scenario.signals"))
      spec.signals = cfg::require_double_array(manifest, "scenario.signals");
    if (cfg::find(manifest, "scenario.correlations"))
      spec.correlations = cfg::require_double_array(manifest, "scenario.correlations");

    if (spec.kind == ExperimentKind::Fig2SweepSensors) {
      if (!spec.broadcast_signal)
        throw SpecError("scenario.signal: fig2_sweep_sensors needs a broadcast sensor signal");
      const auto& arr = cfg::require_double_array(manifest, "sweep.n_sensors");
      if (arr.empty()) throw SpecError("sweep.n_sensors: list must be non-empty");
      for (double v : arr) {
        if (v < 1 || v != std::floor(v))
          throw SpecError("sweep.n_sensors: entries must be positive integers");
        spec.sweep_sensors.push_back(static_cast<int>(v));
      }
      spec.window = cfg::require_double(manifest, "scenario.window");
      spec.t_fc = cfg::require_double(manifest, "scenario.t_fc");
    } else {
      if (spec.correlations.empty())
        throw SpecError("scenario.correlations: required for this experiment kind");
      if (!spec.broadcast_signal && spec.signals.empty())
        throw SpecError("scenario: provide signals = [...] or a broadcast signal value");
      if (spec.broadcast_signal && spec.signals.empty())
        spec.signals.assign(spec.correlations.size(), spec.signal);
      if (spec.signals.size() != spec.correlations.size())
        throw SpecError("scenario.signals: length must match scenario.correlations");
      if (spec.kind == ExperimentKind::Fig3SweepTfc) {
        spec.sweep_windows = cfg::require_double_array(manifest, "sweep.windows");
        if (spec.sweep_windows.empty()) throw SpecError("sweep.windows: list must be non-empty");
        spec.tfc_points = static_cast<int>(cfg::get_integer(manifest, "sweep.t_fc_points", 41));
        if (spec.tfc_points < 2) throw SpecError("sweep.t_fc_points: need at least 2 points");
      } else {
        spec.window = cfg::require_double(manifest, "scenario.window");
        spec.t_fc = cfg::require_double(manifest, "scenario.t_fc");
      }
    }

    spec.optimizer.n_starts = static_cast<int>(cfg::get_integer(manifest, "optimizer.n_starts", 32));
    spec.optimizer.max_iters =
        static_cast<int>(cfg::get_integer(manifest, "optimizer.max_iters", 300));
    spec.optimizer.grid_resolution =
        static_cast<int>(cfg::get_integer(manifest, "optimizer.grid_resolution", 401));
    spec.seed = static_cast<std::uint64_t>(cfg::get_integer(manifest, "run.seed", 0));
    spec.hypothesis = parse_hypothesis(cfg::get_string(manifest, "run.hypothesis", "h0"),
                                       "run.hypothesis");
    spec.mc_trials = static_cast<int>(cfg::get_integer(manifest, "run.mc_trials",
                                                       spec.kind == ExperimentKind::McValidation
                                                           ? 10000
                                                           : 0));
    spec.mc_max_stages =
        static_cast<int>(cfg::get_integer(manifest, "run.mc_max_stages", 1'000'000));
    spec.output_path = cfg::get_string(manifest, "output.path", "results.csv");
  } catch (const cfg::ConfigError& e) {
    throw SpecError(e.what());
  }

  // fail now, with sweep-point context, rather than midway through a run
  expand_sweep(spec);
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  try {
    return parse_spec(cfg::parse_file(path));
  } catch (const cfg::ConfigError& e) {
    throw SpecError(e.what());
  }
}

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec) {
  std::vector<SweepPoint> points;
  switch (spec.kind) {
    case ExperimentKind::Fig2SweepSensors:
      for (int n : spec.sweep_sensors) {
        // half the sensors positively, half negatively correlated with the
        // FC, magnitudes 1/(2N+1) so the feasibility condition always holds
        const double mag = 1.0 / (2.0 * n + 1.0);
        std::vector<double> rho(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) rho[static_cast<std::size_t>(j)] = j < n - n / 2 ? mag : -mag;
        const std::vector<double> sig(static_cast<std::size_t>(n), spec.signal);
        points.push_back(
            {"N=" + std::to_string(n), make_scenario(spec, sig, rho, spec.window, spec.t_fc)});
      }
      break;
    case ExperimentKind::Fig3SweepTfc:
      for (double eps : spec.sweep_windows)
        for (int i = 0; i < spec.tfc_points; ++i) {
          const double t_fc = eps * static_cast<double>(i) / (spec.tfc_points - 1);
          points.push_back({"eps=" + format_double(eps) + ",tfc=" + format_double(t_fc),
                            make_scenario(spec, spec.signals, spec.correlations, eps, t_fc)});
        }
      break;
    case ExperimentKind::SinglePoint:
    case ExperimentKind::McValidation:
      points.push_back(
          {"point", make_scenario(spec, spec.signals, spec.correlations, spec.window, spec.t_fc)});
      break;
  }

  for (const SweepPoint& p : points) {
    const ValidationResult r = validate_scenario(p.scenario);
    if (!r.ok())
      throw SpecError("sweep point " + p.key + ": " + r.to_string());
  }
  return points;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  const std::vector<SweepPoint> points = expand_sweep(spec);
  std::vector<ResultRow> rows(points.size());

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::min<std::size_t>(points.size(), hw == 0 ? 4 : hw);
  std::atomic<std::size_t> cursor{0};
  const auto work = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      rows[i] = compute_row(spec, points[i], i);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ResultRow& r : rows) {
    out += r.sweep_key;
    out += ',';
    out += std::to_string(r.n_sensors);
    for (double v : {r.eps, r.t_fc, r.kld_min, r.kld_max, r.bound_lower, r.bound_upper,
                     r.stop_min, r.stop_max, r.stop_lb, r.stop_ub}) {
      out += ',';
      out += format_double(v);
    }
    if (r.has_mc) {
      out += ',';
      out += format_double(r.mc_mean);
      out += ',';
      out += format_double(r.mc_stderr);
      out += ',';
      out += format_double(r.mc_pfa_or_pd);
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path + " for writing");
  out << to_csv(rows);
  if (!out) throw std::runtime_error("emit_csv: write to " + path + " failed");
}

std::string plot_stub(const std::string& csv_filename) {
  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "\"\"\"Plot the stopping-time series from an asyncsprt sweep CSV.\"\"\"\n";
  s += "import csv\n";
  s += "import sys\n";
  s += "from collections import defaultdict\n";
  s += "\n";
  s += "import matplotlib.pyplot as plt\n";
  s += "\n";
  s += "path = sys.argv[1] if len(sys.argv) > 1 else \"" + csv_filename + "\"\n";
  s += "with open(path, newline=\"\") as fh:\n";
  s += "    rows = [r for r in csv.DictReader(fh) if r[\"kld_min\"] != \"nan\"]\n";
  s += "series = [\"stop_lb\", \"stop_min\", \"stop_max\", \"stop_ub\"]\n";
  s += "groups = defaultdict(list)\n";
  s += "for r in rows:\n";
  s += "    groups[r[\"eps\"]].append(r)\n";
  s += "sweep_tfc = len(groups) > 1 or (rows and len({r[\"t_fc\"] for r in rows}) > 1)\n";
  s += "for eps, grp in sorted(groups.items(), key=lambda kv: float(kv[0])):\n";
  s += "    if sweep_tfc:\n";
  s += "        x = [float(r[\"t_fc\"]) / float(eps) for r in grp]\n";
  s += "        xlabel = \"t_fc / eps\"\n";
  s += "    else:\n";
  s += "        x = [int(r[\"n_sensors\"]) for r in grp]\n";
  s += "        xlabel = \"number of sensors\"\n";
  s += "    for name in series:\n";
  s += "        label = f\"{name} (eps={eps})\" if sweep_tfc else name\n";
  s += "        plt.plot(x, [float(r[name]) for r in grp], marker=\".\", label=label)\n";
  s += "plt.xlabel(xlabel)\n";
  s += "plt.ylabel(\"expected stopping time (groups)\")\n";
  s += "plt.legend(fontsize=7)\n";
  s += "plt.tight_layout()\n";
  s += "plt.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
  s += "print(\"wrote\", path.rsplit(\".\", 1)[0] + \".png\")\n";
  return s;
}

}  // namespace asyncsprt
