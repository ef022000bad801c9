#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace echosim {

// Stationary Ornstein-Uhlenbeck phase noise with correlation
// <phi(t1) phi(t2)> = phi_amp^2 * exp(-gamma |t1 - t2|).
struct NoiseParams {
  double phi_amp = 0.0;       // fluctuation amplitude Phi, radians
  double gamma = 1.0;         // correlation strength, inverse time
  double dt = 1e-3;           // grid step
  std::uint64_t seed = 0;
  std::size_t n_steps = 0;

  void validate() const;      // throws ConfigError on invalid fields

  // dt * gamma < 1 resolves the correlation; callers may warn when violated.
  bool correlation_resolved() const { return dt * gamma < 1.0; }
};

// One realization of phi on the grid t_n = n*dt. Consumers treat the path as
// piecewise constant on [t_n, t_{n+1}).
struct PhasePath {
  std::vector<double> values;  // size n_steps + 1
  double dt = 0.0;

  double duration() const {
    return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1);
  }
};

// Coefficients of the exact one-step update phi' = decay * phi + kick_sd * xi,
// xi standard normal. Exact for any dt: conditional mean decay*phi, conditional
// variance kick_sd^2.
double ou_decay(const NoiseParams& params);
double ou_kick_sd(const NoiseParams& params);

// Draws a stationary path: phi(0) from the stationary law, then the exact
// one-step update. Same (seed, stream_index) always yields the identical path;
// distinct stream indices give independent substreams.
PhasePath sample_path(const NoiseParams& params, std::uint64_t stream_index);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Empirical <phi(t) phi(t+lag)> averaged over paths and admissible t.
// lag must be a nonnegative integer multiple of dt and fit inside every path;
// the standard error comes from the path-to-path spread.
Estimate autocorrelation_estimate(std::span<const PhasePath> paths, double lag);

}  // namespace echosim
