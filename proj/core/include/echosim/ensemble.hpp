#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "echosim/echo.hpp"
#include "echosim/noise.hpp"

namespace echosim {

// One phase realization drives both pulses, or each pulse gets its own.
enum class PhaseMode { Shared, Independent };

// What to do when a repeat hits the factorization singularity. Abort keeps
// statistics unbiased; SkipAndCount drops the repeat and reports how many.
enum class SingularityPolicy { Abort, SkipAndCount };

struct RunSpec {
  EchoConfig echo;
  AtomParams atom;
  NoiseParams noise;  // n_steps is derived from the pulse durations
  std::size_t n_repeats = 1;
  PhaseMode phase_mode = PhaseMode::Shared;
  SingularityPolicy singularity_policy = SingularityPolicy::Abort;

  void validate() const;
};

struct HistogramBin {
  double center = 0.0;
  double probability = 0.0;
};

struct SignalPoint {
  double t = 0.0;
  double value = 0.0;
};

struct EnsembleStats {
  std::vector<double> f_values;  // per-repeat factor, repeat-index order
  double mean_f = 0.0;           // index-ordered arithmetic mean of f_values
  double se_f = 0.0;
  double mode_f = 0.0;           // center of the tallest histogram bin
  double f_ideal = 0.0;          // factor of the zero-noise path through the same pipeline
  std::vector<HistogramBin> histogram;  // Freedman-Diaconis binning of f_values
  std::vector<SignalPoint> signal_mean;
  std::vector<SignalPoint> signal_mode;
  std::vector<SignalPoint> signal_ideal;
  std::size_t skipped_repeats = 0;
};

// Repeats the two-pulse experiment over random phase realizations. Repeat r
// uses RNG substream r (Shared) or substreams 2r, 2r+1 (Independent), so the
// result is bit-identical for any thread count. Signal curves are the
// open-system amplitude: (|mu|^2/64) exp(-sigma0^2 (T-tau)^2 - (T+tau)/tau_c)
// scaled by mean/mode/ideal factor respectively.
EnsembleStats run_ensemble(const RunSpec& spec, int threads = 1);

struct SignalDistribution {
  std::vector<double> t_values;
  std::vector<double> bin_centers;               // shared amplitude axis from 0
  std::vector<std::vector<double>> probabilities;  // [t][bin], columns sum to 1
};

// Amplitude histogram at each detection time over repeats.
SignalDistribution signal_distribution(const RunSpec& spec, std::span<const double> t_values,
                                       std::size_t n_bins, int threads = 1);
SignalDistribution signal_distribution_from(const EnsembleStats& stats, const RunSpec& spec,
                                            std::span<const double> t_values,
                                            std::size_t n_bins);

enum class SweepParameter { Phi, Gamma, Tau };

struct SweepRow {
  double value = 0.0;
  double mc = 0.0;        // Phi/Gamma: mean factor minus ideal; Tau: mean amplitude at T=tau
  double se = 0.0;
  double analytic = 0.0;  // second-order prediction on the same scale
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::Phi;
  std::vector<SweepRow> rows;
};

// One ensemble per value; each sweep point gets an independent derived seed.
// Requires equal pulse durations for the analytic column.
SweepTable sweep_parameter(const RunSpec& base, SweepParameter parameter,
                           std::span<const double> values, int threads = 1);

}  // namespace echosim
