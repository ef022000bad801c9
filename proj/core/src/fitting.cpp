#include "echosim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace echosim {

FitResult fit_coherence_time(const DecayCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 3) {
    throw std::domain_error("fit_coherence_time needs at least 3 points");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].mean_signal > 0.0)) {
      throw std::domain_error("fit_coherence_time: signals must be positive");
    }
    if (i > 0 && !(pts[i].tau > pts[i - 1].tau)) {
      throw std::domain_error("fit_coherence_time: delays must be strictly increasing");
    }
  }

  const bool weighted =
      std::all_of(pts.begin(), pts.end(), [](const DecayPoint& p) { return p.se > 0.0; });

  std::vector<double> x(pts.size()), y(pts.size()), w(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x[i] = pts[i].tau;
    y[i] = std::log(pts[i].mean_signal);
    // se of log(S) is se/S
    const double sy = weighted ? pts[i].se / pts[i].mean_signal : 1.0;
    w[i] = 1.0 / (sy * sy);
  }

  double wsum = 0.0, xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    wsum += w[i];
    xbar += w[i] * x[i];
    ybar += w[i] * y[i];
  }
  xbar /= wsum;
  ybar /= wsum;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;

  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    rss += w[i] * r * r;
  }

  double slope_se;
  if (weighted) {
    slope_se = std::sqrt(1.0 / sxx);
  } else {
    const double dof = static_cast<double>(x.size()) - 2.0;
    slope_se = dof > 0.0 ? std::sqrt(rss / dof / sxx) : 0.0;
  }

  FitResult result;
  result.residual = std::sqrt(rss);
  result.amplitude = std::exp(intercept);

  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*ymin == *ymax || slope == 0.0) {
    result.zero_slope = true;
    result.tau_c = std::numeric_limits<double>::infinity();
    result.tau_c_se = std::numeric_limits<double>::infinity();
    return result;
  }
  result.tau_c = -2.0 / slope;
  result.tau_c_se = 2.0 * slope_se / (slope * slope);
  return result;
}

}  // namespace echosim
