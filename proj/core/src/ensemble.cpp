#include "echosim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "echosim/errors.hpp"
#include "echosim/perturbation.hpp"

namespace echosim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (salt + 1));
}

// Type-7 quantile (linear interpolation) on sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<HistogramBin> freedman_diaconis_histogram(const std::vector<double>& values) {
  const auto n = values.size();
  if (n == 0) return {};
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double width = 2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);

  if (!(width > 0.0) || !(hi > lo)) {
    return {{lo, 1.0}};
  }
  const std::size_t n_bins =
      std::min<std::size_t>(4096, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  const double bin_width = (hi - lo) / static_cast<double>(n_bins);

  std::vector<std::size_t> counts(n_bins, 0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / bin_width);
    if (idx >= n_bins) idx = n_bins - 1;
    ++counts[idx];
  }
  std::vector<HistogramBin> bins(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    bins[i].center = lo + (static_cast<double>(i) + 0.5) * bin_width;
    bins[i].probability = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return bins;
}

double histogram_mode(const std::vector<HistogramBin>& bins) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < bins.size(); ++i) {
    if (bins[i].probability > bins[best].probability) best = i;
  }
  return bins.empty() ? 0.0 : bins[best].center;
}

double open_envelope(const AtomParams& atom, double t, double tau) {
  const double d = t - tau;
  return std::exp(-atom.sigma0 * atom.sigma0 * d * d - (t + tau) / atom.tau_c);
}

struct RepeatOutcome {
  double f = 0.0;
  bool singular = false;
  std::size_t step = 0;
};

// Per-repeat factors in repeat-index order plus the zero-noise reference.
struct RawEnsemble {
  std::vector<RepeatOutcome> outcomes;
  double f_ideal = 0.0;
};

RawEnsemble compute_factors(const RunSpec& spec, int threads) {
  spec.validate();
  const PulseParams& p1 = spec.echo.pulse1;
  const PulseParams& p2 = spec.echo.pulse2;
  const double rabi = p1.rabi;

  const std::size_t n1 = steps_for(p1.duration, spec.noise.dt);
  const std::size_t n2 = steps_for(p2.duration, spec.noise.dt);
  NoiseParams noise = spec.noise;
  noise.n_steps = std::max<std::size_t>(std::max(n1, n2), 1);

  RawEnsemble raw;
  {
    PhasePath zero;
    zero.dt = spec.noise.dt;
    zero.values.assign(noise.n_steps + 1, 0.0);
    raw.f_ideal = strength_factor(integrate_chi(p1, zero), integrate_chi(p2, zero), rabi);
  }

  const std::size_t n = spec.n_repeats;
  raw.outcomes.resize(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr unexpected;
  std::atomic<bool> have_unexpected{false};

  const auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n || have_unexpected.load()) break;
      try {
        ChiParams chi, zeta;
        if (spec.phase_mode == PhaseMode::Shared) {
          const PhasePath path = sample_path(noise, r);
          chi = integrate_chi(p1, path);
          // equal pulses on one realization are the same computation
          zeta = n1 == n2 ? chi : integrate_chi(p2, path);
        } else {
          NoiseParams noise1 = noise;
          noise1.n_steps = std::max<std::size_t>(n1, 1);
          NoiseParams noise2 = noise;
          noise2.n_steps = std::max<std::size_t>(n2, 1);
          chi = integrate_chi(p1, sample_path(noise1, 2 * r));
          zeta = integrate_chi(p2, sample_path(noise2, 2 * r + 1));
        }
        raw.outcomes[r] = {strength_factor(chi, zeta, rabi), false, 0};
      } catch (const SingularityError& e) {
        raw.outcomes[r] = {0.0, true, e.step};
      } catch (...) {
        if (!have_unexpected.exchange(true)) unexpected = std::current_exception();
        break;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (have_unexpected.load()) std::rethrow_exception(unexpected);

  if (spec.singularity_policy == SingularityPolicy::Abort) {
    for (std::size_t r = 0; r < n; ++r) {
      if (raw.outcomes[r].singular) {
        throw SingularityError("repeat " + std::to_string(r) +
                                   " hit the factorization singularity at step " +
                                   std::to_string(raw.outcomes[r].step),
                               raw.outcomes[r].step, r);
      }
    }
  }
  return raw;
}

}  // namespace

void RunSpec::validate() const {
  echo.validate();
  atom.validate();
  if (!(noise.dt > 0.0)) throw ConfigError("noise.dt must be > 0");
  if (!(noise.gamma > 0.0)) throw ConfigError("noise.gamma must be > 0");
  if (!(noise.phi_amp >= 0.0)) throw ConfigError("noise.phi_amp must be >= 0");
  if (n_repeats < 1) throw ConfigError("ensemble.n_repeats must be >= 1");
  if (echo.pulse1.rabi != echo.pulse2.rabi) {
    throw ConfigError("both pulses must share one Rabi frequency");
  }
}

EnsembleStats run_ensemble(const RunSpec& spec, int threads) {
  const RawEnsemble raw = compute_factors(spec, threads);

  EnsembleStats stats;
  stats.f_ideal = raw.f_ideal;
  stats.f_values.reserve(spec.n_repeats);
  for (const RepeatOutcome& o : raw.outcomes) {
    if (o.singular) {
      ++stats.skipped_repeats;
    } else {
      stats.f_values.push_back(o.f);
    }
  }
  if (stats.f_values.empty()) {
    throw SingularityError("all repeats hit the factorization singularity", 0);
  }

  const auto n = stats.f_values.size();
  double sum = 0.0;
  for (double f : stats.f_values) sum += f;
  stats.mean_f = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double f : stats.f_values) ss += (f - stats.mean_f) * (f - stats.mean_f);
    stats.se_f = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  stats.histogram = freedman_diaconis_histogram(stats.f_values);
  stats.mode_f = histogram_mode(stats.histogram);

  const double scale = spec.atom.dipole_mag * spec.atom.dipole_mag / 64.0;
  stats.signal_mean.reserve(spec.echo.t_grid.size());
  stats.signal_mode.reserve(spec.echo.t_grid.size());
  stats.signal_ideal.reserve(spec.echo.t_grid.size());
  for (double t : spec.echo.t_grid) {
    const double env = scale * open_envelope(spec.atom, t, spec.echo.tau);
    stats.signal_mean.push_back({t, env * stats.mean_f});
    stats.signal_mode.push_back({t, env * stats.mode_f});
    stats.signal_ideal.push_back({t, env * stats.f_ideal});
  }
  return stats;
}

SignalDistribution signal_distribution_from(const EnsembleStats& stats, const RunSpec& spec,
                                            std::span<const double> t_values,
                                            std::size_t n_bins) {
  if (n_bins < 2) throw ConfigError("signal distribution needs at least 2 bins");
  if (t_values.empty()) throw ConfigError("signal distribution needs detection times");

  const double scale = spec.atom.dipole_mag * spec.atom.dipole_mag / 64.0;
  double max_f = 0.0;
  for (double f : stats.f_values) max_f = std::max(max_f, f);

  double max_amp = 0.0;
  std::vector<double> envs(t_values.size());
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    envs[i] = scale * open_envelope(spec.atom, t_values[i], spec.echo.tau);
    max_amp = std::max(max_amp, envs[i] * max_f);
  }
  const double bin_width = max_amp > 0.0 ? max_amp / static_cast<double>(n_bins) : 1.0;

  SignalDistribution dist;
  dist.t_values.assign(t_values.begin(), t_values.end());
  dist.bin_centers.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    dist.bin_centers[b] = (static_cast<double>(b) + 0.5) * bin_width;
  }
  dist.probabilities.assign(t_values.size(), std::vector<double>(n_bins, 0.0));

  const auto n = static_cast<double>(stats.f_values.size());
  std::vector<std::size_t> counts(n_bins);
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    counts.assign(n_bins, 0);
    for (double f : stats.f_values) {
      auto idx = static_cast<std::size_t>(envs[i] * f / bin_width);
      if (idx >= n_bins) idx = n_bins - 1;
      ++counts[idx];
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
      dist.probabilities[i][b] = static_cast<double>(counts[b]) / n;
    }
  }
  return dist;
}

SignalDistribution signal_distribution(const RunSpec& spec, std::span<const double> t_values,
                                       std::size_t n_bins, int threads) {
  const EnsembleStats stats = run_ensemble(spec, threads);
  return signal_distribution_from(stats, spec, t_values, n_bins);
}

SweepTable sweep_parameter(const RunSpec& base, SweepParameter parameter,
                           std::span<const double> values, int threads) {
  if (values.empty()) throw ConfigError("sweep values must not be empty");
  base.validate();
  const bool equal_pulses = base.echo.pulse1.duration == base.echo.pulse2.duration;

  SweepTable table;
  table.parameter = parameter;
  table.rows.reserve(values.size());

  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    RunSpec spec = base;
    spec.noise.seed = derive_seed(base.noise.seed, i);
    switch (parameter) {
      case SweepParameter::Phi:
        spec.noise.phi_amp = v;
        break;
      case SweepParameter::Gamma:
        spec.noise.gamma = v;
        break;
      case SweepParameter::Tau:
        spec.echo.tau = v;
        break;
    }

    const EnsembleStats stats = run_ensemble(spec, threads);
    PerturbationInputs pin{spec.echo.pulse1.rabi, spec.echo.pulse1.duration,
                           spec.noise.phi_amp, spec.noise.gamma};
    const double analytic_delta =
        equal_pulses ? mean_strength_factor_delta(pin) + 0.0
                     : std::numeric_limits<double>::quiet_NaN();

    SweepRow row;
    row.value = v;
    if (parameter == SweepParameter::Tau) {
      const double scale = spec.atom.dipole_mag * spec.atom.dipole_mag / 64.0;
      const double decay = std::exp(-2.0 * spec.echo.tau / spec.atom.tau_c);
      row.mc = scale * decay * stats.mean_f;
      row.se = scale * decay * stats.se_f;
      row.analytic = scale * decay * (stats.f_ideal + analytic_delta);
    } else {
      // mean of per-repeat deviations: exactly zero in the noise-free case
      double sum = 0.0;
      for (double f : stats.f_values) sum += f - stats.f_ideal;
      const double mean_delta = sum / static_cast<double>(stats.f_values.size());
      double ss = 0.0;
      for (double f : stats.f_values) {
        const double d = f - stats.f_ideal - mean_delta;
        ss += d * d;
      }
      const auto n = static_cast<double>(stats.f_values.size());
      row.mc = mean_delta;
      row.se = n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
      row.analytic = analytic_delta;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace echosim
