#include "echosim/oracles.hpp"

#include <cmath>
#include <vector>

#include "echosim/errors.hpp"

namespace echosim::oracles {

namespace {

using cd = std::complex<double>;

// Full-square trapezoid of a symmetric kernel K(s_i, s_j) over [0, T]^2 on a
// uniform grid with n intervals per axis. The exponential factor exp(-g|s_i -
// s_j|) only depends on |i - j|, so it is tabulated once; the kink sits
// exactly on grid nodes, which keeps the trapezoid error expansion clean for
// Richardson extrapolation.
template <typename Diag, typename Lower>
double trapezoid_2d_sym(std::size_t n, double h, Diag diag, Lower lower) {
  double total = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double wi = (i == 0 || i == n) ? 0.5 * h : h;
    total += wi * wi * diag(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double wj = (j == 0 || j == n) ? 0.5 * h : h;
      inner += wj * lower(i, j);
    }
    total += 2.0 * wi * inner;
  }
  return total;
}

double chi2sq_grid(const PerturbationInputs& p, std::size_t n) {
  const double T = p.delta_tau;
  const double h = T / static_cast<double>(n);
  std::vector<double> f(n + 1), decay(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) * h;
    f[i] = std::cos(2.0 * p.rabi * (T - s));
    decay[i] = std::exp(-p.gamma * static_cast<double>(i) * h);
  }
  const double integral = trapezoid_2d_sym(
      n, h, [&](std::size_t i) { return f[i] * f[i]; },
      [&](std::size_t i, std::size_t j) { return f[i] * f[j] * decay[i - j]; });
  return p.phi_amp * p.phi_amp * integral;
}

double chi1_grid(const PerturbationInputs& p, std::size_t n) {
  const double T = p.delta_tau;
  const double W = p.rabi;
  const double h = T / static_cast<double>(n);
  const double phi2 = p.phi_amp * p.phi_amp;

  // <chi3 phi> piece: -Phi^2 int_0^T (T-v) sin(2Wv) e^{-gv} dv
  double ib = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double v = static_cast<double>(i) * h;
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    ib += w * (T - v) * std::sin(2.0 * W * v) * std::exp(-p.gamma * v);
  }

  // <chi3^2> - <chi2^2> piece: their time integrals differ by the double
  // integral of exp(-g|s1-s2|) [sin(4WT - 2W(s1+s2)) - sin(2W|s1-s2|)],
  // obtained by integrating the oscillatory square over the detection window
  // in closed elementary form.
  const double A = 4.0 * W * T;
  std::vector<double> sa(n + 1), cq(n + 1), s1(n + 1), c1(n + 1), decay(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double a = 2.0 * W * static_cast<double>(i) * h;
    s1[i] = std::sin(a);
    c1[i] = std::cos(a);
    sa[i] = std::sin(A - a) - s1[i];  // multiplies cos(a_j)
    cq[i] = c1[i] - std::cos(A - a);  // multiplies sin(a_j)
    decay[i] = std::exp(-p.gamma * static_cast<double>(i) * h);
  }
  const double icd = trapezoid_2d_sym(
      n, h,
      [&](std::size_t i) { return std::sin(A - 4.0 * W * static_cast<double>(i) * h); },
      [&](std::size_t i, std::size_t j) {
        return decay[i - j] * (sa[i] * c1[j] + cq[i] * s1[j]);
      });

  return phi2 * T / 2.0 - 2.0 * W * phi2 * ib - 0.5 * phi2 * W * icd;
}

QuadratureResult richardson(double coarse, double fine) {
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

}  // namespace

ChiDeriv chi_rhs_unsimplified(const ChiParams& chi, double phi, double rabi) {
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const double c3 = std::cos(2.0 * chi.chi3 * rabi);
  const double s3 = std::sin(2.0 * chi.chi3 * rabi);
  const double tan2 = std::tan(2.0 * chi.chi2 * rabi);
  const double sec2 = 1.0 / std::cos(2.0 * chi.chi2 * rabi);
  return {-cp * c3 * sec2 + sp * sec2 * s3,
          c3 * sp + cp * s3,
          -cp * c3 * tan2 + sp * s3 * tan2};
}

std::array<Mat2, 3> su2_generators(double rabi) {
  const cd w(rabi, 0.0);
  const Mat2 h1{cd(0, 0), w, w, cd(0, 0)};
  const Mat2 h2{cd(0, 0), cd(0, -rabi), cd(0, rabi), cd(0, 0)};
  const Mat2 h3{w, cd(0, 0), cd(0, 0), -w};
  return {h1, h2, h3};
}

Mat2 commutator(const Mat2& a, const Mat2& b) {
  const auto mul = [](const Mat2& x, const Mat2& y) {
    return Mat2{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
  };
  const Mat2 ab = mul(a, b);
  const Mat2 ba = mul(b, a);
  return {ab[0] - ba[0], ab[1] - ba[1], ab[2] - ba[2], ab[3] - ba[3]};
}

Mat2 scaled(const Mat2& a, cd factor) {
  return {factor * a[0], factor * a[1], factor * a[2], factor * a[3]};
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

QuadratureResult chi2sq_quadrature(const PerturbationInputs& p, std::size_t n) {
  p.validate();
  if (n < 2) throw ConfigError("quadrature needs at least 2 grid intervals");
  if (p.delta_tau == 0.0) return {0.0, 0.0};
  return richardson(chi2sq_grid(p, n), chi2sq_grid(p, 2 * n));
}

QuadratureResult chi1_quadrature(const PerturbationInputs& p, std::size_t n) {
  p.validate();
  if (n < 2) throw ConfigError("quadrature needs at least 2 grid intervals");
  if (p.delta_tau == 0.0) return {0.0, 0.0};
  return richardson(chi1_grid(p, n), chi1_grid(p, 2 * n));
}

}  // namespace echosim::oracles
