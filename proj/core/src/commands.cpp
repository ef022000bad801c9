#include "echosim/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "echosim/csv.hpp"
#include "echosim/errors.hpp"
#include "echosim/fitting.hpp"
#include "echosim/oracles.hpp"
#include "echosim/perturbation.hpp"

namespace echosim {

namespace {

void warn_unresolved_correlation(const NoiseParams& noise, std::ostream& log) {
  if (!noise.correlation_resolved()) {
    log << "warning: noise.dt * noise.gamma = " << noise.dt * noise.gamma
        << " >= 1; the grid does not resolve the phase correlation\n";
  }
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  warn_unresolved_correlation(cfg.run.noise, log);
  const EnsembleStats stats = run_ensemble(cfg.run, cfg.threads);

  {
    CsvWriter signal(cfg.output.prefix + "signal.csv");
    signal.header("T,mean_amplitude,mode_amplitude,ideal_amplitude");
    for (std::size_t i = 0; i < stats.signal_mean.size(); ++i) {
      signal.row({stats.signal_mean[i].t, stats.signal_mean[i].value,
                  stats.signal_mode[i].value, stats.signal_ideal[i].value});
    }
  }
  {
    CsvWriter hist(cfg.output.prefix + "f_hist.csv");
    hist.header("bin_center,probability");
    for (const HistogramBin& b : stats.histogram) {
      hist.row({b.center, b.probability});
    }
  }
  if (cfg.output.signal_distribution_bins) {
    const SignalDistribution dist = signal_distribution_from(
        stats, cfg.run, cfg.run.echo.t_grid, *cfg.output.signal_distribution_bins);
    CsvWriter out(cfg.output.prefix + "signal_dist.csv");
    out.header("T,bin_center,probability");
    for (std::size_t i = 0; i < dist.t_values.size(); ++i) {
      for (std::size_t b = 0; b < dist.bin_centers.size(); ++b) {
        out.row({dist.t_values[i], dist.bin_centers[b], dist.probabilities[i][b]});
      }
    }
  }
  write_manifest(cfg, "simulate");

  log << "simulate: " << stats.f_values.size() << " repeats";
  if (stats.skipped_repeats > 0) log << " (" << stats.skipped_repeats << " skipped)";
  log << ", mean factor " << stats.mean_f << " +/- " << stats.se_f << ", ideal "
      << stats.f_ideal << "\n";
  log << "wrote " << cfg.output.prefix << "signal.csv, " << cfg.output.prefix
      << "f_hist.csv, " << cfg.output.prefix << "manifest.json\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("sweep command needs a 'sweep' config section or --param/--values");
  if (cfg.sweep->parameter == SweepParameter::Tau) {
    throw ConfigError("sweep over TAU is served by the fit command");
  }
  if (cfg.sweep->values.empty()) throw ConfigError("sweep values must not be empty");
  warn_unresolved_correlation(cfg.run.noise, log);

  const SweepTable table =
      sweep_parameter(cfg.run, cfg.sweep->parameter, cfg.sweep->values, cfg.threads);
  {
    CsvWriter out(cfg.output.prefix + "sweep.csv");
    out.header("value,mc_delta_f,se,analytic_delta_f");
    for (const SweepRow& r : table.rows) {
      out.row({r.value, r.mc, r.se, r.analytic});
    }
  }
  write_manifest(cfg, "sweep");
  log << "sweep: " << table.rows.size() << " points, wrote " << cfg.output.prefix
      << "sweep.csv\n";
  return 0;
}

int cmd_fit(const ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.fit) throw ConfigError("fit command needs a 'fit' config section or --taus");
  if (cfg.fit->tau_values.size() < 3) {
    throw ConfigError("fit needs at least 3 delay values");
  }
  warn_unresolved_correlation(cfg.run.noise, log);

  const SweepTable table =
      sweep_parameter(cfg.run, SweepParameter::Tau, cfg.fit->tau_values, cfg.threads);
  DecayCurve curve;
  curve.points.reserve(table.rows.size());
  for (const SweepRow& r : table.rows) {
    curve.points.push_back({r.value, r.mc, r.se});
  }
  const FitResult fit = fit_coherence_time(curve);

  {
    CsvWriter out(cfg.output.prefix + "fit.csv");
    out.header("tau,mean_signal,se,fitted_signal");
    for (const DecayPoint& p : curve.points) {
      out.row({p.tau, p.mean_signal, p.se,
               fit.amplitude * std::exp(-2.0 * p.tau / fit.tau_c)});
    }
  }
  write_manifest(cfg, "fit");

  // |slope| <= 2 slope_se is equivalent to tau_c <= 2 tau_c_se
  const bool no_decay = fit.zero_slope || !(fit.tau_c > 0.0) || fit.tau_c <= 2.0 * fit.tau_c_se;
  if (no_decay) {
    log << "no decoherence detected (flat decay curve)\n";
  } else {
    log << "tau_c = " << fit.tau_c << " +/- " << fit.tau_c_se
        << " (amplitude " << fit.amplitude << ", residual " << fit.residual << ")\n";
  }
  log << "wrote " << cfg.output.prefix << "fit.csv\n";
  return 0;
}

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

NoiseParams reference_noise(double phi_amp, std::size_t n_steps) {
  NoiseParams noise;
  noise.phi_amp = phi_amp;
  noise.gamma = 1.0 / 4.587;
  noise.dt = 1e-3;
  noise.seed = 20260811;
  noise.n_steps = n_steps;
  return noise;
}

Check check_rhs_consistency() {
  std::mt19937_64 rng(7);
  const auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ChiParams chi{uniform(-3.0, 3.0), uniform(-0.7, 0.7), uniform(-3.0, 3.0)};
    const double phi = uniform(-3.141592653589793, 3.141592653589793);
    const ChiDeriv a = chi_rhs(chi, phi, 1.0);
    const ChiDeriv b = oracles::chi_rhs_unsimplified(chi, phi, 1.0);
    worst = std::max({worst, std::abs(a.d1 - b.d1), std::abs(a.d2 - b.d2),
                      std::abs(a.d3 - b.d3)});
  }
  return {"parameter derivatives vs raw inversion", worst <= 1e-12,
          "max diff " + fmt(worst) + " (tol 1e-12)"};
}

Check check_generator_algebra() {
  const double rabi = 1.0;
  const auto h = oracles::su2_generators(rabi);
  double worst = 0.0;
  const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                            {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                            {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      oracles::Mat2 expected{};
      for (int l = 0; l < 3; ++l) {
        if (eps[i][j][l] == 0) continue;
        const auto term = oracles::scaled(
            h[l], std::complex<double>(0.0, 2.0 * rabi * eps[i][j][l]));
        for (int e = 0; e < 4; ++e) expected[e] += term[e];
      }
      worst = std::max(worst, oracles::max_abs_diff(oracles::commutator(h[i], h[j]), expected));
    }
  }
  return {"generator commutation relations", worst <= 1e-12,
          "max diff " + fmt(worst) + " (tol 1e-12)"};
}

Check check_zero_noise() {
  const double dt = 1e-3;
  double worst = 0.0;
  for (double duration : {0.5, 1.0, 2.375, 4.75}) {
    PhasePath zero;
    zero.dt = dt;
    zero.values.assign(steps_for(duration, dt) + 1, 0.0);
    const ChiParams chi = integrate_chi({1.0, duration, WavevectorTag::K1}, zero);
    worst = std::max({worst, std::abs(chi.chi1 + duration), std::abs(chi.chi2),
                      std::abs(chi.chi3)});
  }
  return {"zero-noise closed form", worst <= 1e-10, "max diff " + fmt(worst) + " (tol 1e-10)"};
}

Check check_propagator_oracle() {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  const NoiseParams noise = reference_noise(0.08, 4750);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const PhasePath path = sample_path(noise, s);
    const Unitary2 uf = factorized_unitary(integrate_chi(pulse, path), pulse.rabi);
    const Unitary2 ud = direct_unitary(pulse, path);
    worst = std::max(worst, frobenius_distance(uf, ud));
  }
  return {"factorized vs direct propagator (100 paths)", worst <= 1e-8,
          "max Frobenius defect " + fmt(worst) + " (tol 1e-8)"};
}

Check check_rk4_convergence() {
  const double duration = 4.75;
  NoiseParams coarse = reference_noise(0.08, 100);
  coarse.dt = duration / 100.0;
  PhasePath path = sample_path(coarse, 3);

  std::vector<double> defects;
  for (int level = 0; level < 5; ++level) {
    const PulseParams pulse{1.0, duration, WavevectorTag::K1};
    defects.push_back(frobenius_distance(
        factorized_unitary(integrate_chi(pulse, path), pulse.rabi),
        direct_unitary(pulse, path)));
    PhasePath finer;
    finer.dt = path.dt / 2.0;
    finer.values.reserve(path.values.size() * 2 - 1);
    for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
      finer.values.push_back(path.values[i]);
      finer.values.push_back(path.values[i]);
    }
    finer.values.push_back(path.values.back());
    path = std::move(finer);
  }
  bool pass = true;
  std::string detail = "defects";
  for (std::size_t i = 0; i < defects.size(); ++i) {
    detail += " " + fmt(defects[i]);
    if (i > 0 && defects[i - 1] > 1e-10 && defects[i] > 1e-13) {
      pass = pass && defects[i - 1] / defects[i] >= 8.0;
    }
  }
  return {"integrator step-halving convergence", pass, detail};
}

Check check_quadrature_oracles() {
  double worst = 0.0;
  double worst_est = 0.0;
  for (double gamma : {0.05, 0.218, 1.0, 5.0}) {
    const PerturbationInputs p{1.0, 4.75, 0.05, gamma};
    const auto q2 = oracles::chi2sq_quadrature(p, 10000);
    const auto q1 = oracles::chi1_quadrature(p, 10000);
    worst = std::max({worst, std::abs(q2.value - chi2sq_mean(p)),
                      std::abs(q1.value - chi1_mean(p))});
    worst_est = std::max({worst_est, q2.error_estimate, q1.error_estimate});
  }
  return {"moment closed forms vs grid quadrature", worst <= 1e-8,
          "max diff " + fmt(worst) + " (tol 1e-8, oracle error est " + fmt(worst_est) + ")"};
}

Check check_linearized_mc() {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  bool pass = true;
  std::string detail;
  for (double gamma : {0.218, 1.0}) {
    NoiseParams noise = reference_noise(0.05, 4750);
    noise.gamma = gamma;
    const std::size_t n = 10000;
    double sum1 = 0.0, sum2 = 0.0, ss1 = 0.0, ss2 = 0.0;
    std::vector<double> v1(n), v2(n);
    for (std::size_t r = 0; r < n; ++r) {
      const ChiParams lin = linearized_chi_path(pulse, sample_path(noise, r));
      v1[r] = lin.chi1 + pulse.duration;
      v2[r] = lin.chi2 * lin.chi2;
      sum1 += v1[r];
      sum2 += v2[r];
    }
    const double m1 = sum1 / static_cast<double>(n);
    const double m2 = sum2 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      ss1 += (v1[r] - m1) * (v1[r] - m1);
      ss2 += (v2[r] - m2) * (v2[r] - m2);
    }
    const double se1 = std::sqrt(ss1 / static_cast<double>(n - 1) / static_cast<double>(n));
    const double se2 = std::sqrt(ss2 / static_cast<double>(n - 1) / static_cast<double>(n));
    const PerturbationInputs p{1.0, 4.75, 0.05, gamma};
    const double z1 = std::abs(m1 - chi1_mean(p)) / se1;
    const double z2 = std::abs(m2 - chi2sq_mean(p)) / se2;
    pass = pass && z1 <= 3.0 && z2 <= 3.0;
    detail += "gamma=" + fmt(gamma) + " z=(" + fmt(z1) + "," + fmt(z2) + ") ";
  }
  return {"linearized moments: Monte Carlo vs closed forms", pass, detail + "(tol 3 SE)"};
}

Check check_mean_factor_mc() {
  RunSpec spec;
  spec.echo.tau = 5.0;
  spec.echo.t_grid = {5.0};
  spec.echo.pulse1 = {1.0, 4.75, WavevectorTag::K1};
  spec.echo.pulse2 = {1.0, 4.75, WavevectorTag::K2};
  spec.noise = reference_noise(0.05, 0);
  spec.n_repeats = 2000;
  const EnsembleStats stats = run_ensemble(spec, 2);

  double sum = 0.0;
  for (double f : stats.f_values) sum += f - stats.f_ideal;
  const double mc_delta = sum / static_cast<double>(stats.f_values.size());
  const PerturbationInputs p{1.0, 4.75, 0.05, spec.noise.gamma};
  const double z = std::abs(mc_delta - mean_strength_factor_delta(p)) / stats.se_f;
  return {"mean factor prediction vs Monte Carlo", z <= 3.0,
          "z = " + fmt(z) + " (tol 3 SE, n=2000)"};
}

}  // namespace

int cmd_validate(std::ostream& log) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  std::vector<Check> checks;
  checks.push_back(check_rhs_consistency());
  checks.push_back(check_generator_algebra());
  checks.push_back(check_zero_noise());
  checks.push_back(check_propagator_oracle());
  checks.push_back(check_rk4_convergence());
  checks.push_back(check_quadrature_oracles());
  checks.push_back(check_linearized_mc());
  checks.push_back(check_mean_factor_mc());

  bool all = true;
  for (const Check& c : checks) {
    log << (c.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(48) << c.name
        << ' ' << c.detail << "\n";
    all = all && c.pass;
  }
  const auto secs =
      std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - t0).count();
  log << (all ? "all checks passed" : "VALIDATION FAILED") << " (" << fmt(secs) << " s)\n";
  return all ? 0 : 1;
}

}  // namespace echosim
