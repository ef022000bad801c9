#include "echosim/echo.hpp"

#include <cmath>

#include "echosim/errors.hpp"

namespace echosim {

void AtomParams::validate() const {
  if (!(sigma0 >= 0.0)) throw ConfigError("atom.sigma0 must be >= 0");
  if (!(dipole_mag > 0.0)) throw ConfigError("atom.dipole_mag must be > 0");
  if (!(tau_c > 0.0)) throw ConfigError("atom.tau_c must be > 0");
}

void EchoConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("echo.tau must be > 0");
  if (t_grid.empty()) throw ConfigError("echo detection grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw ConfigError("echo detection times must be >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ConfigError("echo detection grid must be strictly increasing");
    }
  }
  pulse1.validate();
  pulse2.validate();
}

double strength_factor(const ChiParams& chi, const ChiParams& zeta, double rabi) {
  const double sp = std::sin((zeta.chi2 + zeta.chi1) * rabi);
  const double sm = std::sin((zeta.chi2 - zeta.chi1) * rabi);
  const double first = sp * sp + sm * sm;

  const double a = std::sin(2.0 * (chi.chi2 - chi.chi1) * rabi) +
                   std::sin(2.0 * (chi.chi2 + chi.chi1) * rabi);
  const double b = std::sin(2.0 * chi.chi1 * rabi);
  return first * first * (a * a + 4.0 * b * b);
}

double ideal_strength_factor(double rabi, double delta_tau) {
  const double s = std::sin(rabi * delta_tau);
  const double s2 = std::sin(2.0 * rabi * delta_tau);
  return 16.0 * s * s * s * s * s2 * s2;
}

double inhomogeneous_envelope(const AtomParams& atom, double t_detect, double tau) {
  const double d = t_detect - tau;
  return std::exp(-atom.sigma0 * atom.sigma0 * d * d);
}

double echo_amplitude(const ChiParams& chi, const ChiParams& zeta, const AtomParams& atom,
                      double t_detect, double tau, double rabi) {
  const double mu2 = atom.dipole_mag * atom.dipole_mag;
  return mu2 / 64.0 * inhomogeneous_envelope(atom, t_detect, tau) *
         strength_factor(chi, zeta, rabi);
}

double open_amplitude(const ChiParams& chi, const ChiParams& zeta, const AtomParams& atom,
                      double t_detect, double tau, double rabi) {
  return echo_amplitude(chi, zeta, atom, t_detect, tau, rabi) *
         std::exp(-(t_detect + tau) / atom.tau_c);
}

std::complex<double> echo_field_term(const ChiParams& chi, const ChiParams& zeta,
                                     const AtomParams& atom, double t_detect, double tau,
                                     double rabi) {
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);

  const cd prefactor = i * atom.dipole_mag *
                       std::polar(1.0, -(t_detect - tau) * atom.eps0) *
                       std::polar(1.0, 2.0 * rabi * (zeta.chi3 - chi.chi3)) / 8.0;

  cd second(std::sin((zeta.chi2 + zeta.chi1) * rabi),
            std::sin((zeta.chi2 - zeta.chi1) * rabi));
  second *= second;

  const cd first(std::sin(2.0 * (chi.chi2 - chi.chi1) * rabi) +
                     std::sin(2.0 * (chi.chi2 + chi.chi1) * rabi),
                 2.0 * std::sin(2.0 * chi.chi1 * rabi));

  return prefactor * second * first;
}

}  // namespace echosim
