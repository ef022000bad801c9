#include "echosim/propagator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "echosim/errors.hpp"

namespace echosim {

namespace {

using cd = std::complex<double>;

constexpr double kChi2Limit = std::numbers::pi / 2.0 - 0.1;

inline ChiParams advanced(const ChiParams& chi, double h, const ChiDeriv& d) {
  return {chi.chi1 + h * d.d1, chi.chi2 + h * d.d2, chi.chi3 + h * d.d3};
}

inline void kahan_add(double& sum, double& comp, double term) {
  const double y = term - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

void PulseParams::validate() const {
  if (!(rabi > 0.0)) throw ConfigError("pulse rabi frequency must be > 0");
  if (!(duration >= 0.0)) throw ConfigError("pulse duration must be >= 0");
}

Unitary2 Unitary2::identity() {
  return {{cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(1.0, 0.0)}};
}

Unitary2 Unitary2::operator*(const Unitary2& rhs) const {
  const auto& a = m;
  const auto& b = rhs.m;
  return {{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
           a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]}};
}

Unitary2 Unitary2::adjoint() const {
  return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
}

double frobenius_distance(const Unitary2& a, const Unitary2& b) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += std::norm(a.m[i] - b.m[i]);
  return std::sqrt(sum);
}

double unitarity_defect(const Unitary2& u) {
  const Unitary2 p = u * u.adjoint();
  const Unitary2 id = Unitary2::identity();
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(p.m[i] - id.m[i]));
  return worst;
}

double global_phase_distance(const Unitary2& a, const Unitary2& b) {
  int k = 0;
  for (int i = 1; i < 4; ++i) {
    if (std::abs(b.m[i]) > std::abs(b.m[k])) k = i;
  }
  if (std::abs(b.m[k]) < 1e-300) return frobenius_distance(a, b);
  cd phase = a.m[k] / b.m[k];
  const double mag = std::abs(phase);
  if (mag < 1e-300) return frobenius_distance(a, b);
  phase /= mag;
  Unitary2 rotated = b;
  for (auto& e : rotated.m) e *= phase;
  return frobenius_distance(a, rotated);
}

ChiDeriv chi_rhs(const ChiParams& chi, double phi, double rabi) {
  const double arg = phi + 2.0 * chi.chi3 * rabi;
  const double c = std::cos(arg);
  const double s = std::sin(arg);
  const double fold = 2.0 * chi.chi2 * rabi;
  const double sec = 1.0 / std::cos(fold);
  return {-c * sec, s, -c * std::tan(fold)};
}

std::size_t steps_for(double duration, double dt) {
  if (!(dt > 0.0)) throw ConfigError("grid step must be > 0");
  if (!(duration >= 0.0)) throw ConfigError("duration must be >= 0");
  const double ratio = duration / dt;
  const auto n = static_cast<long long>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-6 * std::max(1.0, ratio)) {
    throw ConfigError("duration " + std::to_string(duration) +
                      " is not an integer multiple of grid step " + std::to_string(dt));
  }
  return static_cast<std::size_t>(n);
}

ChiParams integrate_chi(const PulseParams& pulse, const PhasePath& phase) {
  pulse.validate();
  const std::size_t n = steps_for(pulse.duration, phase.dt);
  if (n > 0 && phase.values.size() < n) {
    throw ConfigError("phase path does not cover the pulse duration");
  }

  const double dt = phase.dt;
  const double rabi = pulse.rabi;
  ChiParams chi;
  double comp1 = 0.0, comp2 = 0.0, comp3 = 0.0;  // compensated accumulation

  for (std::size_t k = 0; k < n; ++k) {
    const double p = phase.values[k];
    const ChiDeriv k1 = chi_rhs(chi, p, rabi);
    const ChiDeriv k2 = chi_rhs(advanced(chi, 0.5 * dt, k1), p, rabi);
    const ChiDeriv k3 = chi_rhs(advanced(chi, 0.5 * dt, k2), p, rabi);
    const ChiDeriv k4 = chi_rhs(advanced(chi, dt, k3), p, rabi);
    const double w = dt / 6.0;
    kahan_add(chi.chi1, comp1, w * (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1));
    kahan_add(chi.chi2, comp2, w * (k1.d2 + 2.0 * k2.d2 + 2.0 * k3.d2 + k4.d2));
    kahan_add(chi.chi3, comp3, w * (k1.d3 + 2.0 * k2.d3 + 2.0 * k3.d3 + k4.d3));
    // negated comparison also catches NaN states
    if (!(std::abs(2.0 * chi.chi2 * rabi) < kChi2Limit)) {
      throw SingularityError("factorization parameter chi2 left its valid chart at step " +
                                 std::to_string(k),
                             k);
    }
  }
  return chi;
}

Unitary2 direct_unitary(const PulseParams& pulse, const PhasePath& phase) {
  pulse.validate();
  const std::size_t n = steps_for(pulse.duration, phase.dt);
  if (n > 0 && phase.values.size() < n) {
    throw ConfigError("phase path does not cover the pulse duration");
  }

  const double theta = pulse.rabi * phase.dt;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Unitary2 u = Unitary2::identity();
  for (std::size_t k = 0; k < n; ++k) {
    const double p = phase.values[k];
    const double cp = std::cos(p);
    const double sp = std::sin(p);
    // exp(-i dt * rabi * (-cos(p) sx + sin(p) sy))
    const Unitary2 step{{cd(c, 0.0), cd(-s * sp, s * cp), cd(s * sp, s * cp), cd(c, 0.0)}};
    u = step * u;
  }
  return u;
}

Unitary2 factorized_unitary(const ChiParams& chi, double rabi) {
  const double a1 = rabi * chi.chi1;
  const double a2 = rabi * chi.chi2;
  const double a3 = rabi * chi.chi3;

  const Unitary2 rz{{std::polar(1.0, -a3), cd(0.0, 0.0), cd(0.0, 0.0), std::polar(1.0, a3)}};
  const Unitary2 ry{{cd(std::cos(a2), 0.0), cd(-std::sin(a2), 0.0),
                     cd(std::sin(a2), 0.0), cd(std::cos(a2), 0.0)}};
  const Unitary2 rx{{cd(std::cos(a1), 0.0), cd(0.0, -std::sin(a1)),
                     cd(0.0, -std::sin(a1)), cd(std::cos(a1), 0.0)}};
  return rz * (ry * rx);
}

ChiParams decompose_unitary(const Unitary2& u, double rabi) {
  if (unitarity_defect(u) > 1e-8) {
    throw std::domain_error("decompose_unitary: input is not unitary");
  }
  if (!(rabi > 0.0)) throw ConfigError("rabi frequency must be > 0");

  // Rotation matrix R[i][j] = 0.5 Re tr(s_i U s_j U^dag); immune to the
  // global phase of u.
  const Unitary2 sx{{cd(0, 0), cd(1, 0), cd(1, 0), cd(0, 0)}};
  const Unitary2 sy{{cd(0, 0), cd(0, -1), cd(0, 1), cd(0, 0)}};
  const Unitary2 sz{{cd(1, 0), cd(0, 0), cd(0, 0), cd(-1, 0)}};
  const Unitary2 sig[3] = {sx, sy, sz};
  const Unitary2 ud = u.adjoint();

  double r[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Unitary2 mprod = sig[i] * (u * (sig[j] * ud));
      r[i][j] = 0.5 * (mprod.m[0] + mprod.m[3]).real();
    }
  }

  const double beta = std::asin(std::clamp(-r[2][0], -1.0, 1.0));
  double alpha = 0.0;
  double gamma = 0.0;
  if (std::cos(beta) > 1e-9) {
    alpha = std::atan2(r[1][0], r[0][0]);
    gamma = std::atan2(r[2][1], r[2][2]);
  } else {
    // gimbal lock: only alpha +/- gamma is determined; put it all in alpha
    alpha = std::atan2(-r[0][1], r[1][1]);
  }
  const double half = 2.0 * rabi;
  return {gamma / half, beta / half, alpha / half};
}

}  // namespace echosim
