#include "echosim/noise.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>

#include "echosim/errors.hpp"

namespace echosim {

namespace {

// Deterministic normal sampler: std::mt19937_64 (sequence fixed by the
// standard) plus explicit Box-Muller, so paths are bit-identical across
// platforms. std::normal_distribution is unspecified and would not be.
class NormalSampler {
 public:
  NormalSampler(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform01() {  // in (0, 1], safe for log
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

void NoiseParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("noise.dt must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("noise.gamma must be > 0");
  if (!(phi_amp >= 0.0)) throw ConfigError("noise.phi_amp must be >= 0");
  if (n_steps < 1) throw ConfigError("noise.n_steps must be >= 1");
}

double ou_decay(const NoiseParams& params) {
  return std::exp(-params.gamma * params.dt);
}

double ou_kick_sd(const NoiseParams& params) {
  return params.phi_amp * std::sqrt(-std::expm1(-2.0 * params.gamma * params.dt));
}

PhasePath sample_path(const NoiseParams& params, std::uint64_t stream_index) {
  params.validate();
  NormalSampler normal(params.seed, stream_index);

  PhasePath path;
  path.dt = params.dt;
  path.values.resize(params.n_steps + 1);
  path.values[0] = params.phi_amp * normal();
  const double decay = ou_decay(params);
  const double kick = ou_kick_sd(params);
  for (std::size_t i = 0; i < params.n_steps; ++i) {
    path.values[i + 1] = path.values[i] * decay + kick * normal();
  }
  return path;
}

Estimate autocorrelation_estimate(std::span<const PhasePath> paths, double lag) {
  if (paths.size() < 2) {
    throw std::invalid_argument("autocorrelation_estimate needs at least 2 paths");
  }
  const double dt = paths[0].dt;
  const double ratio = lag / dt;
  const auto k = static_cast<long long>(std::llround(ratio));
  if (k < 0 || std::abs(ratio - static_cast<double>(k)) > 1e-6) {
    throw std::invalid_argument("lag must be a nonnegative integer multiple of dt");
  }

  std::vector<double> per_path;
  per_path.reserve(paths.size());
  for (const PhasePath& p : paths) {
    if (p.dt != dt) throw std::invalid_argument("paths must share one grid step");
    const auto n = static_cast<long long>(p.values.size()) - 1;
    if (k > n) throw std::domain_error("lag exceeds path duration");
    double sum = 0.0;
    const long long count = n - k + 1;
    for (long long i = 0; i < count; ++i) {
      sum += p.values[static_cast<std::size_t>(i)] *
             p.values[static_cast<std::size_t>(i + k)];
    }
    per_path.push_back(sum / static_cast<double>(count));
  }

  double mean = 0.0;
  for (double v : per_path) mean += v;
  mean /= static_cast<double>(per_path.size());
  double ss = 0.0;
  for (double v : per_path) ss += (v - mean) * (v - mean);
  const double n_paths = static_cast<double>(per_path.size());
  const double se = std::sqrt(ss / (n_paths - 1.0) / n_paths);
  return {mean, se};
}

}  // namespace echosim
