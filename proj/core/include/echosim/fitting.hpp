#pragma once

#include <vector>

namespace echosim {

struct DecayPoint {
  double tau = 0.0;
  double mean_signal = 0.0;
  double se = 0.0;
};

// Averaged revival-time signal versus inter-pulse delay.
struct DecayCurve {
  std::vector<DecayPoint> points;
};

struct FitResult {
  double tau_c = 0.0;     // infinity when zero_slope is set
  double tau_c_se = 0.0;
  double amplitude = 0.0; // fitted signal at tau = 0
  double residual = 0.0;  // weighted residual norm in log space
  bool zero_slope = false;
};

// Weighted least squares of log(mean_signal) against tau: the decay
// exp(-2 tau / tau_c) is exactly log-linear, so the estimator is closed form.
// Weights are 1/se^2 propagated through the log transform; unweighted when any
// se is missing. Requires >= 3 points with strictly increasing tau and
// positive signals (throws std::domain_error otherwise). A constant curve
// reports infinite tau_c with the zero_slope flag.
FitResult fit_coherence_time(const DecayCurve& curve);

}  // namespace echosim
