#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "echosim/errors.hpp"
#include "echosim/noise.hpp"
#include "echosim/oracles.hpp"
#include "echosim/propagator.hpp"

using namespace echosim;

namespace {

PhasePath zero_path(double duration, double dt) {
  PhasePath p;
  p.dt = dt;
  p.values.assign(steps_for(duration, dt) + 1, 0.0);
  return p;
}

PhasePath constant_path(double value, double duration, double dt) {
  PhasePath p = zero_path(duration, dt);
  for (double& v : p.values) v = value;
  return p;
}

NoiseParams reference_noise(std::uint64_t seed = 99) {
  NoiseParams p;
  p.phi_amp = 0.08;
  p.gamma = 1.0 / 4.587;
  p.dt = 1e-3;
  p.seed = seed;
  p.n_steps = 4750;
  return p;
}

PhasePath refine(const PhasePath& path) {
  PhasePath finer;
  finer.dt = path.dt / 2.0;
  finer.values.reserve(path.values.size() * 2 - 1);
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
    finer.values.push_back(path.values[i]);
    finer.values.push_back(path.values[i]);
  }
  finer.values.push_back(path.values.back());
  return finer;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("noise-free pulse gives chi = (-duration, 0, 0)") {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  const ChiParams chi = integrate_chi(pulse, zero_path(4.75, 1e-3));
  CHECK(std::abs(chi.chi1 + 4.75) <= 1e-10);
  CHECK(std::abs(chi.chi2) <= 1e-10);
  CHECK(std::abs(chi.chi3) <= 1e-10);
}

TEST_CASE("zero duration keeps the initial condition") {
  const PulseParams pulse{2.0, 0.0, WavevectorTag::K1};
  const ChiParams chi = integrate_chi(pulse, zero_path(0.1, 1e-3));
  CHECK(chi.chi1 == 0.0);
  CHECK(chi.chi2 == 0.0);
  CHECK(chi.chi3 == 0.0);
}

TEST_CASE("factorized route matches the direct product on noisy paths") {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  const NoiseParams noise = reference_noise();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PhasePath path = sample_path(noise, s);
    const Unitary2 uf = factorized_unitary(integrate_chi(pulse, path), pulse.rabi);
    const Unitary2 ud = direct_unitary(pulse, path);
    CHECK(frobenius_distance(uf, ud) <= 1e-8);
  }
}

TEST_CASE("direct unitary special values") {
  SUBCASE("zero duration is the identity") {
    const Unitary2 u = direct_unitary({1.0, 0.0, WavevectorTag::K1}, zero_path(0.1, 1e-3));
    CHECK(frobenius_distance(u, Unitary2::identity()) == 0.0);
  }
  SUBCASE("quarter period at zero phase is i*sx") {
    const double dur = std::numbers::pi / 2.0;
    const double dt = dur / 10000.0;
    const Unitary2 u = direct_unitary({1.0, dur, WavevectorTag::K1}, zero_path(dur, dt));
    CHECK(std::abs(u.m[0]) <= 1e-10);
    CHECK(std::abs(u.m[3]) <= 1e-10);
    CHECK(std::abs(u.m[1] - std::complex<double>(0.0, 1.0)) <= 1e-10);
    CHECK(std::abs(u.m[2] - std::complex<double>(0.0, 1.0)) <= 1e-10);
  }
  SUBCASE("unitarity defect stays at the floor on random paths") {
    const NoiseParams noise = reference_noise(3);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Unitary2 u = direct_unitary({1.0, 4.75, WavevectorTag::K1}, sample_path(noise, s));
      CHECK(unitarity_defect(u) <= 1e-10);
    }
  }
}

TEST_CASE("factorized unitary special values") {
  CHECK(frobenius_distance(factorized_unitary({0.0, 0.0, 0.0}, 1.0), Unitary2::identity()) ==
        0.0);

  // x rotation by -pi equals the quarter-period direct evolution above
  const Unitary2 u = factorized_unitary({-std::numbers::pi / 2.0, 0.0, 0.0}, 1.0);
  CHECK(std::abs(u.m[0]) <= 1e-15);
  CHECK(std::abs(u.m[1] - std::complex<double>(0.0, 1.0)) <= 1e-15);
  CHECK(std::abs(u.m[2] - std::complex<double>(0.0, 1.0)) <= 1e-15);
}

TEST_CASE("decompose_unitary round-trips through the matrix") {
  CHECK(std::abs(decompose_unitary(Unitary2::identity(), 1.0).chi1) == 0.0);
  CHECK(std::abs(decompose_unitary(Unitary2::identity(), 1.0).chi2) == 0.0);
  CHECK(std::abs(decompose_unitary(Unitary2::identity(), 1.0).chi3) == 0.0);

  SUBCASE("explicit example") {
    const Unitary2 u = factorized_unitary({-1.0, 0.1, 0.2}, 1.0);
    const ChiParams back = decompose_unitary(u, 1.0);
    CHECK(global_phase_distance(factorized_unitary(back, 1.0), u) <= 1e-8);
    CHECK(std::abs(2.0 * back.chi2) <= std::numbers::pi / 2.0 + 1e-12);
  }
  SUBCASE("i*sx round-trips") {
    const Unitary2 isx{{std::complex<double>(0, 0), std::complex<double>(0, 1),
                        std::complex<double>(0, 1), std::complex<double>(0, 0)}};
    const ChiParams back = decompose_unitary(isx, 1.0);
    CHECK(global_phase_distance(factorized_unitary(back, 1.0), isx) <= 1e-8);
  }
  SUBCASE("random rotations round-trip up to global phase") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
      const ChiParams chi{uniform(rng, -3.0, 3.0), uniform(rng, -0.7, 0.7),
                          uniform(rng, -3.0, 3.0)};
      const double rabi = uniform(rng, 0.5, 2.0);
      const Unitary2 u = factorized_unitary(chi, rabi);
      const ChiParams back = decompose_unitary(u, rabi);
      CHECK(global_phase_distance(factorized_unitary(back, rabi), u) <= 1e-8);
      CHECK(std::abs(2.0 * rabi * back.chi2) <= std::numbers::pi / 2.0 + 1e-12);
    }
  }
  SUBCASE("rejects a non-unitary input") {
    Unitary2 bad = Unitary2::identity();
    bad.m[0] = 2.0;
    CHECK_THROWS_AS(decompose_unitary(bad, 1.0), std::domain_error);
  }
}

TEST_CASE("simplified derivatives equal the raw inversion form") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double rabi = uniform(rng, 0.5, 2.0);
    // keep |2 chi2 rabi| inside the chart; at its boundary both forms blow up
    const ChiParams chi{uniform(rng, -3.0, 3.0), uniform(rng, -0.7, 0.7) / rabi,
                        uniform(rng, -3.0, 3.0)};
    const double phi = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const ChiDeriv a = chi_rhs(chi, phi, rabi);
    const ChiDeriv b = oracles::chi_rhs_unsimplified(chi, phi, rabi);
    worst = std::max({worst, std::abs(a.d1 - b.d1), std::abs(a.d2 - b.d2),
                      std::abs(a.d3 - b.d3)});
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("generators satisfy the angular momentum algebra") {
  for (double rabi : {1.0, 0.7, 2.5}) {
    const auto h = oracles::su2_generators(rabi);
    const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                              {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                              {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        oracles::Mat2 expected{};
        for (int l = 0; l < 3; ++l) {
          if (eps[i][j][l] == 0) continue;
          const auto term =
              oracles::scaled(h[l], std::complex<double>(0.0, 2.0 * rabi * eps[i][j][l]));
          for (int e = 0; e < 4; ++e) expected[e] += term[e];
        }
        CHECK(oracles::max_abs_diff(oracles::commutator(h[i], h[j]), expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("step halving shrinks the oracle defect fourth order") {
  const double duration = 4.75;
  NoiseParams coarse = reference_noise(12);
  coarse.n_steps = 100;
  coarse.dt = duration / 100.0;
  PhasePath path = sample_path(coarse, 0);

  const PulseParams pulse{1.0, duration, WavevectorTag::K1};
  double previous = -1.0;
  for (int level = 0; level < 5; ++level) {
    const double defect = frobenius_distance(
        factorized_unitary(integrate_chi(pulse, path), pulse.rabi), direct_unitary(pulse, path));
    if (previous > 1e-10 && defect > 1e-13) {
      CHECK(previous / defect >= 8.0);
    }
    previous = defect;
    path = refine(path);
  }
  CHECK(previous <= 1e-10);  // reached the floor
}

TEST_CASE("chart-boundary crossing raises the singularity error") {
  // constant phase pi/2 drives chi2 linearly through the chart boundary
  const PhasePath path = constant_path(std::numbers::pi / 2.0, 1.0, 1e-3);
  CHECK_THROWS_AS(integrate_chi({1.0, 1.0, WavevectorTag::K1}, path), SingularityError);
  try {
    integrate_chi({1.0, 1.0, WavevectorTag::K1}, path);
  } catch (const SingularityError& e) {
    CHECK(e.step > 0);
    CHECK(e.step < 1000);
  }
}

TEST_CASE("grid misalignment is a configuration error") {
  const PhasePath path = zero_path(1.0, 1e-3);
  CHECK_THROWS_AS(integrate_chi({1.0, 0.7503, WavevectorTag::K1}, path), ConfigError);
  CHECK_THROWS_AS(direct_unitary({1.0, 0.7503, WavevectorTag::K1}, path), ConfigError);
  // path shorter than the pulse
  CHECK_THROWS_AS(integrate_chi({1.0, 2.0, WavevectorTag::K1}, path), ConfigError);
  // invalid pulse
  CHECK_THROWS_AS(integrate_chi({-1.0, 1.0, WavevectorTag::K1}, path), ConfigError);
}
