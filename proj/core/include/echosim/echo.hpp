#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "echosim/propagator.hpp"

namespace echosim {

struct AtomParams {
  double eps0 = 0.0;       // ensemble-mean transition energy
  double sigma0 = 1.0;     // inhomogeneous width
  double dipole_mag = 1.0; // |mu|
  double tau_c = std::numeric_limits<double>::infinity();  // coherence time

  void validate() const;
};

struct EchoConfig {
  double tau = 1.0;              // inter-pulse delay
  std::vector<double> t_grid;    // detection times, strictly increasing
  PulseParams pulse1;
  PulseParams pulse2;

  void validate() const;
};

// Dimensionless signal-strength factor built from the two pulses' parameters:
//   F = {sin^2[(z2+z1)W] + sin^2[(z2-z1)W]}^2
//       * {[sin(2(c2-c1)W) + sin(2(c2+c1)W)]^2 + 4 sin^2(2 c1 W)}
// Nonnegative; at most 64.
double strength_factor(const ChiParams& chi, const ChiParams& zeta, double rabi);

// Noise-free factor 16 sin^4(W dtau) sin^2(2 W dtau) for equal pulses.
double ideal_strength_factor(double rabi, double delta_tau);

// Amplitude-level Gaussian envelope exp(-sigma0^2 (T - tau)^2) from the
// ensemble sum over transition energies.
double inhomogeneous_envelope(const AtomParams& atom, double t_detect, double tau);

// A = (|mu|^2 / 64) * envelope * F
double echo_amplitude(const ChiParams& chi, const ChiParams& zeta, const AtomParams& atom,
                      double t_detect, double tau, double rabi);

// Open-system amplitude: echo_amplitude * exp(-(T + tau)/tau_c). Reduces
// exactly to echo_amplitude for infinite tau_c.
double open_amplitude(const ChiParams& chi, const ChiParams& zeta, const AtomParams& atom,
                      double t_detect, double tau, double rabi);

// Complex field component with the rephasing spatial order, evaluated at the
// mean transition energy and with the spatial factor dropped (it is tracked
// symbolically, never numerically). Satisfies 64 |.|^2 / |mu|^2 = F.
std::complex<double> echo_field_term(const ChiParams& chi, const ChiParams& zeta,
                                     const AtomParams& atom, double t_detect, double tau,
                                     double rabi);

}  // namespace echosim
