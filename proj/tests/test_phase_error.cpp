#include <cmath>
#include <complex>

#include <doctest.h>

#include "phase_error.hpp"

using namespace simbf;

TEST_CASE("uniform xi at sigma^2 = 0.1 matches sin(iota)/iota") {
  const PhaseErrorModel m = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1);
  CHECK(m.parameter == doctest::Approx(std::sqrt(0.3)).epsilon(1e-15));
  const double oracle = std::sin(std::sqrt(0.3)) / std::sqrt(0.3);
  CHECK(m.xi == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(m.xi == doctest::Approx(0.9507446651178117).epsilon(1e-12));
}

TEST_CASE("xi tends to 1 as the error vanishes") {
  const PhaseErrorModel m = phase_error_from_variance(PhaseErrorFamily::Uniform, 1e-12);
  CHECK(m.xi > 1.0 - 1e-12);
  CHECK(m.xi <= 1.0);
}

TEST_CASE("von Mises xi at sigma^2 = 0.01 is I1(100)/I0(100)") {
  const PhaseErrorModel m = phase_error_from_variance(PhaseErrorFamily::VonMises, 0.01);
  CHECK(m.parameter == doctest::Approx(100.0));
  const double oracle = std::cyl_bessel_i(1.0, 100.0) / std::cyl_bessel_i(0.0, 100.0);
  CHECK(m.xi == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("variance mapping") {
  CHECK(phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1).parameter ==
        doctest::Approx(0.5477225575051661));
  CHECK(phase_error_from_variance(PhaseErrorFamily::VonMises, 0.01).parameter ==
        doctest::Approx(100.0));
  // zero variance collapses to the error-free model
  const PhaseErrorModel none = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.0);
  CHECK(none.family == PhaseErrorFamily::None);
  CHECK(none.xi == 1.0);
  CHECK(none.sigma_sq == 0.0);
}

TEST_CASE("out-of-range parameters are rejected") {
  CHECK_THROWS_AS(phase_error_from_variance(PhaseErrorFamily::Uniform, -0.1),
                  std::invalid_argument);
  // uniform support is capped at iota = pi
  CHECK_THROWS_AS(phase_error_from_variance(PhaseErrorFamily::Uniform, kPi * kPi / 3.0 + 1e-6),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_error_from_parameter(PhaseErrorFamily::Uniform, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_error_from_parameter(PhaseErrorFamily::VonMises, -1.0),
                  std::invalid_argument);
}

TEST_CASE("xi decreases with the error variance in both families") {
  double previous = 1.0;
  for (double s : {0.01, 0.05, 0.1, 0.5, 1.0}) {
    const double xi = phase_error_from_variance(PhaseErrorFamily::Uniform, s).xi;
    CHECK(xi < previous);
    previous = xi;
  }
  previous = 1.0;
  for (double s : {0.01, 0.05, 0.1, 0.5, 1.0}) {
    const double xi = phase_error_from_variance(PhaseErrorFamily::VonMises, s).xi;
    CHECK(xi < previous);
    previous = xi;
  }
}

TEST_CASE("error-free sampling is the identity") {
  RandomStream rng(7);
  const auto layers = sample_error_matrices(PhaseErrorModel{}, 3, 5, rng);
  CHECK(layers.size() == 3);
  for (const auto& layer : layers) {
    for (long i = 0; i < layer.size(); ++i) CHECK(layer[i] == Complex(1.0, 0.0));
  }
}

TEST_CASE("uniform samples stay inside the support") {
  const PhaseErrorModel m = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.3);
  RandomStream rng(11);
  for (int i = 0; i < 20000; ++i) {
    CHECK(std::abs(sample_phase_error(m, rng)) <= m.parameter);
  }
}

TEST_CASE("empirical first circular moment matches xi for both samplers") {
  const long n = 100000;
  for (auto family : {PhaseErrorFamily::Uniform, PhaseErrorFamily::VonMises}) {
    const PhaseErrorModel m = phase_error_from_variance(family, 0.1);
    RandomStream rng(family == PhaseErrorFamily::Uniform ? 101 : 202);
    Complex sum(0, 0);
    double sq = 0.0, angle_sum = 0.0;
    for (long i = 0; i < n; ++i) {
      const double draw = sample_phase_error(m, rng);
      const Complex p = unit_phasor(draw);
      sum += p;
      sq += std::norm(p - Complex(m.xi, 0.0));
      angle_sum += draw;
    }
    const Complex mean = sum / static_cast<double>(n);
    const double se = std::sqrt(sq / n / n);
    CHECK(std::abs(mean - Complex(m.xi, 0.0)) < 3.0 * se);
    // odd moments vanish: circular mean near zero
    CHECK(std::abs(angle_sum / n) < 3.0 * std::sqrt(m.sigma_sq / n));
  }
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  const PhaseErrorModel m = phase_error_from_variance(PhaseErrorFamily::VonMises, 0.05);
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_phase_error(m, a) == sample_phase_error(m, b));
  }
}
