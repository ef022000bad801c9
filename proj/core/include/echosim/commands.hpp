#pragma once

#include <iosfwd>

#include "echosim/config.hpp"

namespace echosim {

// Each command writes its CSV outputs plus a run manifest under
// cfg.output.prefix and returns a process exit code (0 on success).
// Configuration problems throw ConfigError (exit 2 at the CLI) and a
// singularity abort propagates SingularityError (exit 3).

// signal.csv (T,mean_amplitude,mode_amplitude,ideal_amplitude) and
// f_hist.csv (bin_center,probability); optionally signal_dist.csv.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);

// sweep.csv (value,mc_delta_f,se,analytic_delta_f) for PHI or GAMMA sweeps.
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

// fit.csv (tau,mean_signal,se,fitted_signal) plus the fitted coherence time
// report on the log stream.
int cmd_fit(const ExperimentConfig& cfg, std::ostream& log);

// Runs the oracle suite at the reference parameters and prints one pass/fail
// line per check; returns 0 iff everything passes.
int cmd_validate(std::ostream& log);

}  // namespace echosim
