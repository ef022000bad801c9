#pragma once

#include "echosim/noise.hpp"
#include "echosim/propagator.hpp"

namespace echosim {

struct PerturbationInputs {
  double rabi = 1.0;
  double delta_tau = 0.0;
  double phi_amp = 0.0;
  double gamma = 1.0;

  void validate() const;
};

// Small-noise solution of the linearized parameter dynamics, evaluated by
// trapezoidal quadrature on the phase grid with phi piecewise constant:
//   chi3(t) = -int sin(2W(t-t1)) phi dt1
//   chi2(t) =  int cos(2W(t-t1)) phi dt1
//   chi1(t) = -t + int [phi^2/2 + 2W chi3 phi + 2W^2 chi3^2 - 2W^2 chi2^2] dt1
ChiParams linearized_chi_path(const PulseParams& pulse, const PhasePath& phase);

// Closed-form mean of the squared linearized chi2 at t = delta_tau under the
// exponential phase correlation. Scales exactly as phi_amp^2.
double chi2sq_mean(const PerturbationInputs& p);

// Closed-form mean of the noise-induced part of chi1 (offset -delta_tau
// excluded). Scales exactly as phi_amp^2; may be negative.
double chi1_mean(const PerturbationInputs& p);

// Second-order mean factor for equal pulses: ideal_strength_factor plus the
// chi2sq_mean and chi1_mean corrections.
double mean_strength_factor(const PerturbationInputs& p);

// The correction part alone: mean_strength_factor - ideal_strength_factor.
double mean_strength_factor_delta(const PerturbationInputs& p);

// Second-order factor for one realization's fluctuations (chi1_fluct is the
// deviation from -delta_tau, chi2_fluct the linearized chi2).
double perturbed_factor(double chi1_fluct, double chi2_fluct, const PerturbationInputs& p);

}  // namespace echosim
