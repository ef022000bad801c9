#pragma once

#include <array>
#include <complex>

#include "echosim/noise.hpp"

namespace echosim {

// Symbolic stand-in for the pulse direction. The spatial phase k.r never
// enters any matrix numerically; the echo component is selected analytically,
// so all propagation is done at k.r = 0.
enum class WavevectorTag { K1, K2 };

struct PulseParams {
  double rabi = 1.0;       // Omega, inverse time (hbar = 1)
  double duration = 0.0;   // square-pulse length
  WavevectorTag wavevector = WavevectorTag::K1;

  void validate() const;
};

// Factorization parameters (chi1, chi2, chi3) for a pulse; the same type is
// reused as (zeta1, zeta2, zeta3) for the second pulse.
struct ChiParams {
  double chi1 = 0.0;
  double chi2 = 0.0;
  double chi3 = 0.0;
};

struct Unitary2 {
  // row-major 2x2: {u00, u01, u10, u11}
  std::array<std::complex<double>, 4> m{};

  static Unitary2 identity();
  Unitary2 operator*(const Unitary2& rhs) const;
  Unitary2 adjoint() const;
};

double frobenius_distance(const Unitary2& a, const Unitary2& b);
// max entry norm of U U^dag - I
double unitarity_defect(const Unitary2& u);
// Frobenius distance after aligning a global phase; zero when a and b are the
// same physical rotation.
double global_phase_distance(const Unitary2& a, const Unitary2& b);

struct ChiDeriv {
  double d1 = 0.0;  // dchi1/dt
  double d2 = 0.0;  // dchi2/dt
  double d3 = 0.0;  // dchi3/dt
};

// Time derivatives of the factorization parameters at instantaneous phase phi:
//   dchi3/dt = -cos(phi + 2 chi3 W) tan(2 chi2 W)
//   dchi2/dt =  sin(phi + 2 chi3 W)
//   dchi1/dt = -cos(phi + 2 chi3 W) sec(2 chi2 W)       (W = rabi)
ChiDeriv chi_rhs(const ChiParams& chi, double phi, double rabi);

// Number of grid steps spanned by `duration`; throws ConfigError unless the
// duration is an integer multiple of dt.
std::size_t steps_for(double duration, double dt);

// Classical fixed-step RK4 over the pulse window, phi held constant on each
// grid step, initial condition (0,0,0). Throws SingularityError when
// |2 chi2 rabi| reaches pi/2 - 0.1.
ChiParams integrate_chi(const PulseParams& pulse, const PhasePath& phase);

// Time-ordered product of exact per-step SU(2) exponentials for the same
// piecewise-constant phase. Independent of the factorization; used as the
// reference the factorized route must reproduce.
Unitary2 direct_unitary(const PulseParams& pulse, const PhasePath& phase);

// exp(-i chi3 W sz) exp(-i chi2 W sy) exp(-i chi1 W sx): rotations about
// z, y, x by angles 2 W chi3, 2 W chi2, 2 W chi1.
Unitary2 factorized_unitary(const ChiParams& chi, double rabi);

// Principal-branch inverse of factorized_unitary with 2 W chi2 in
// [-pi/2, pi/2]; result reproduces u up to a global phase. Test helper.
ChiParams decompose_unitary(const Unitary2& u, double rabi);

}  // namespace echosim
