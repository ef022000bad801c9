#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include "echosim/perturbation.hpp"
#include "echosim/propagator.hpp"

// Independent reference computations used by tests and the validate command.
// Everything here deliberately avoids the code paths it is meant to check:
// the parameter derivatives come from the raw matrix inversion instead of the
// simplified form, and the moment values come from grid quadrature of the
// phase correlation kernel instead of the closed forms.
namespace echosim::oracles {

// Raw matrix-inversion form of the parameter derivatives; must agree with
// chi_rhs everywhere away from the chart boundary.
ChiDeriv chi_rhs_unsimplified(const ChiParams& chi, double phi, double rabi);

using Mat2 = std::array<std::complex<double>, 4>;

// Pulse-frame generators at k.r = 0: rabi * (sx, sy, sz).
std::array<Mat2, 3> su2_generators(double rabi);

Mat2 commutator(const Mat2& a, const Mat2& b);
Mat2 scaled(const Mat2& a, std::complex<double> factor);
double max_abs_diff(const Mat2& a, const Mat2& b);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // Richardson |I_2n - I_n| / 3
};

// 2-D trapezoid quadrature of the squared-chi2 moment kernel
//   cos(2W(T-s1)) cos(2W(T-s2)) Phi^2 exp(-gamma |s1-s2|)
// over [0, T]^2, with Richardson extrapolation from n and 2n points per axis.
QuadratureResult chi2sq_quadrature(const PerturbationInputs& p, std::size_t n);

// Same machinery for the mean noise-induced chi1: the time integral of
// Phi^2/2 + 2W <chi3 phi> + 2W^2 <chi3^2> - 2W^2 <chi2^2>, reduced to one- and
// two-dimensional grid quadratures of the correlation kernel.
QuadratureResult chi1_quadrature(const PerturbationInputs& p, std::size_t n);

}  // namespace echosim::oracles
