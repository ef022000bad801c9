#include "echosim/perturbation.hpp"

#include <cmath>
#include <complex>

#include "echosim/echo.hpp"
#include "echosim/errors.hpp"

namespace echosim {

namespace {

// Coefficient of the linear chi1 response of the factor.
double chi1_coefficient(double rabi, double delta_tau) {
  const double x = rabi * delta_tau;
  const double s = std::sin(x);
  return -128.0 * rabi * s * s * s * s * s * (2.0 * std::cos(x) + std::cos(3.0 * x));
}

// Coefficient of the quadratic chi2 response of the factor.
double chi2sq_coefficient(double rabi, double delta_tau) {
  const double x = rabi * delta_tau;
  const double s = std::sin(x);
  const double c2 = std::cos(2.0 * x);
  return 64.0 * rabi * rabi * s * s * s * s * c2 * (2.0 * c2 + 1.0);
}

}  // namespace

void PerturbationInputs::validate() const {
  if (!(rabi > 0.0)) throw ConfigError("perturbation rabi frequency must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("perturbation gamma must be > 0");
  if (!(phi_amp >= 0.0)) throw ConfigError("perturbation phi_amp must be >= 0");
  if (!(delta_tau >= 0.0)) throw ConfigError("perturbation delta_tau must be >= 0");
}

ChiParams linearized_chi_path(const PulseParams& pulse, const PhasePath& phase) {
  pulse.validate();
  const std::size_t n = steps_for(pulse.duration, phase.dt);
  if (n > 0 && phase.values.size() < n) {
    throw ConfigError("phase path does not cover the pulse duration");
  }

  using cd = std::complex<double>;
  const double w = pulse.rabi;
  const double dt = phase.dt;

  // chi2 + i chi3 at time t equals e^{-2iWt} * int_0^t e^{2iWt1} phi dt1;
  // the integral accumulates panel by panel with phi constant per panel.
  cd acc(0.0, 0.0);
  cd wn(0.0, 0.0);  // chi2 + i chi3 at t_k
  double chi1_fluct = 0.0;

  const auto quad_term = [w](double c2, double c3, double p) {
    return 0.5 * p * p + 2.0 * w * c3 * p + 2.0 * w * w * (c3 * c3 - c2 * c2);
  };

  for (std::size_t k = 0; k < n; ++k) {
    const double p = phase.values[k];
    const cd ek = std::polar(1.0, 2.0 * w * dt * static_cast<double>(k));
    const cd ek1 = std::polar(1.0, 2.0 * w * dt * static_cast<double>(k + 1));
    acc += p * dt * 0.5 * (ek + ek1);
    const cd wn1 = std::conj(ek1) * acc;
    chi1_fluct += dt * 0.5 * (quad_term(wn.real(), wn.imag(), p) +
                              quad_term(wn1.real(), wn1.imag(), p));
    wn = wn1;
  }
  return {-pulse.duration + chi1_fluct, wn.real(), wn.imag()};
}

double chi2sq_mean(const PerturbationInputs& p) {
  p.validate();
  const double w = p.rabi;
  const double g = p.gamma;
  const double d = p.delta_tau;
  const double den = g * g + 4.0 * w * w;
  const double bracket =
      g * d / den +
      2.0 * g * std::exp(-g * d) * (g * std::cos(2.0 * d * w) - 2.0 * w * std::sin(2.0 * d * w)) /
          (den * den) +
      (g * std::sin(4.0 * d * w) - 2.0 * w * std::cos(4.0 * d * w)) / (4.0 * w * den) +
      (8.0 * w * w - 6.0 * g * g) / (4.0 * den * den);
  return p.phi_amp * p.phi_amp * bracket;
}

double chi1_mean(const PerturbationInputs& p) {
  p.validate();
  const double w = p.rabi;
  const double g = p.gamma;
  const double d = p.delta_tau;
  const double den = g * g + 4.0 * w * w;
  const double s2 = std::sin(2.0 * d * w);
  const double bracket =
      g * g * d / (2.0 * g * g + 8.0 * w * w) -
      2.0 * g * w * std::exp(-g * d) * (g * s2 + 2.0 * w * std::cos(2.0 * d * w)) / (den * den) +
      (w * std::sin(4.0 * d * w) - g * s2 * s2) / (2.0 * den) +
      4.0 * g * w * w / (den * den);
  return p.phi_amp * p.phi_amp * bracket;
}

double mean_strength_factor_delta(const PerturbationInputs& p) {
  return chi2sq_coefficient(p.rabi, p.delta_tau) * chi2sq_mean(p) +
         chi1_coefficient(p.rabi, p.delta_tau) * chi1_mean(p);
}

double mean_strength_factor(const PerturbationInputs& p) {
  return ideal_strength_factor(p.rabi, p.delta_tau) + mean_strength_factor_delta(p);
}

double perturbed_factor(double chi1_fluct, double chi2_fluct, const PerturbationInputs& p) {
  return ideal_strength_factor(p.rabi, p.delta_tau) +
         chi1_coefficient(p.rabi, p.delta_tau) * chi1_fluct +
         chi2sq_coefficient(p.rabi, p.delta_tau) * chi2_fluct * chi2_fluct;
}

}  // namespace echosim
