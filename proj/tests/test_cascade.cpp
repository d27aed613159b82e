#include <cmath>

#include <doctest.h>

#include "cascade.hpp"
#include "phase_error.hpp"
#include "rng.hpp"

using namespace simbf;

namespace {

constexpr double kLambda = 0.03;

SimGeometry small_stack(int nx, int ny, int layers) {
  GeometryConfig c;
  c.feeds_x = 2;
  c.feeds_y = 1;
  c.feed_spacing_x = kLambda / 2;
  c.feed_spacing_y = kLambda / 2;
  c.elements_x = nx;
  c.elements_y = ny;
  c.element_size_x = kLambda / 4;
  c.element_size_y = kLambda / 4;
  c.layer_spacings.assign(layers, 5 * kLambda);
  return build_urpa_geometry(c);
}

struct Links {
  CMatrix f0;
  std::vector<CMatrix> layers;
  CVector g;
};

Links make_links(const SimGeometry& geometry) {
  Links links;
  links.f0 = feed_to_layer0(geometry, kLambda);
  for (int l = 1; l <= geometry.num_layers(); ++l) {
    links.layers.push_back(layer_to_layer(geometry, l, kLambda, 8));
  }
  links.g = ue_channel(geometry, Vec3(0.2, -0.1, 15.0), kLambda);
  return links;
}

SimPhaseConfig random_phases(int total_layers, int n, uint64_t seed) {
  RandomStream rng(seed);
  SimPhaseConfig phases;
  phases.theta.resize(total_layers);
  for (auto& t : phases.theta) {
    t.resize(n);
    for (int i = 0; i < n; ++i) t[i] = rng.uniform(-kPi, kPi);
  }
  return phases;
}

}  // namespace

TEST_CASE("single-layer cascade is the phased feed link") {
  const SimGeometry geo = small_stack(2, 2, 0);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(1, 4, 3);
  const CMatrix cascade = nominal_cascade(links.f0, links.layers, phases);
  const CMatrix expected = unit_modulus(phases.theta[0]).asDiagonal() * links.f0;
  CHECK((cascade - expected).norm() < 1e-14);
}

TEST_CASE("identity phases collapse the cascade to the raw link product") {
  const SimGeometry geo = small_stack(2, 2, 2);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = zero_phases(3, 4);
  const CMatrix cascade = nominal_cascade(links.f0, links.layers, phases);
  const CMatrix expected = links.layers[1] * links.layers[0] * links.f0;
  CHECK((cascade - expected).norm() < 1e-13 * expected.norm());
}

TEST_CASE("scalar chain: one element per layer multiplies the unit factors") {
  const SimGeometry geo = small_stack(1, 1, 1);
  CMatrix f0 = feed_to_layer0(geo, kLambda);
  f0.conservativeResize(1, 1);  // single feed column
  std::vector<CMatrix> layers{layer_to_layer(geo, 1, kLambda, 8)};
  const SimPhaseConfig phases = random_phases(2, 1, 9);
  const CMatrix cascade = nominal_cascade(f0, layers, phases);
  const double beta = std::norm(layers[0](0, 0));
  CHECK(std::abs(cascade(0, 0)) == doctest::Approx(std::sqrt(beta) * 1.0).epsilon(1e-12));
}

TEST_CASE("zero errors reproduce the nominal cascade") {
  const SimGeometry geo = small_stack(2, 2, 1);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(2, 4, 5);
  RandomStream rng(17);
  const auto errors = sample_error_matrices(PhaseErrorModel{}, 2, 4, rng);
  const CMatrix realized = realized_cascade(links.f0, links.layers, phases, errors);
  const CMatrix nominal = nominal_cascade(links.f0, links.layers, phases);
  CHECK((realized - nominal).norm() < 1e-14);
}

TEST_CASE("a single element error only rotates that element's row") {
  const SimGeometry geo = small_stack(2, 2, 0);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = zero_phases(1, 4);
  std::vector<CVector> errors{CVector::Ones(4)};
  errors[0][2] = unit_phasor(0.7);
  const CMatrix realized = realized_cascade(links.f0, links.layers, phases, errors);
  const CMatrix nominal = nominal_cascade(links.f0, links.layers, phases);
  for (int r = 0; r < 4; ++r) {
    if (r == 2) {
      CHECK((realized.row(r) - unit_phasor(0.7) * nominal.row(r)).norm() < 1e-14);
    } else {
      CHECK((realized.row(r) - nominal.row(r)).norm() == 0.0);
    }
  }
}

TEST_CASE("mean channel is the xi-scaled error-free channel") {
  const SimGeometry geo = small_stack(3, 3, 1);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(2, 9, 7);
  const CMatrix cascade = nominal_cascade(links.f0, links.layers, phases);
  const CVector error_free = (links.g.adjoint() * cascade).adjoint();

  SUBCASE("xi = 1") {
    const CVector mean = mean_baseband_channel(links.f0, links.layers, links.g, phases, 1.0);
    CHECK((mean - error_free).norm() < 1e-13 * error_free.norm());
  }
  SUBCASE("uniform sigma^2 = 0.1 scales by xi^2 for L = 1") {
    const double xi = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1).xi;
    const CVector mean = mean_baseband_channel(links.f0, links.layers, links.g, phases, xi);
    CHECK((mean - xi * xi * error_free).norm() < 1e-13 * error_free.norm());
    CHECK(mean.norm() / error_free.norm() == doctest::Approx(0.90391541824998).epsilon(1e-9));
  }
}

TEST_CASE("Monte Carlo mean of the realized channel matches the closed form") {
  const SimGeometry geo = small_stack(2, 2, 1);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(2, 4, 21);
  const PhaseErrorModel model = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1);
  const CVector mean_theory =
      mean_baseband_channel(links.f0, links.layers, links.g, phases, model.xi);

  const long samples = 20000;
  RandomStream rng(4242);
  CVector sum = CVector::Zero(2);
  RVector sq = RVector::Zero(2);
  for (long i = 0; i < samples; ++i) {
    const auto errors = sample_error_matrices(model, 2, 4, rng);
    const CMatrix realized = realized_cascade(links.f0, links.layers, phases, errors);
    const CVector h = (links.g.adjoint() * realized).adjoint();
    sum += h;
    sq += (h - mean_theory).cwiseAbs2();
  }
  const CVector mean_emp = sum / static_cast<double>(samples);
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(sq[i] / samples / samples);
    CHECK(std::abs(mean_emp[i] - mean_theory[i]) < 3.5 * se);
  }
}

TEST_CASE("covariance closed form") {
  const SimGeometry geo = small_stack(2, 2, 1);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(2, 4, 31);

  SUBCASE("error-free stacks carry no uncertainty") {
    const CMatrix c = channel_uncertainty_covariance(links.f0, links.layers, links.g, phases, 1.0);
    CHECK(c.norm() == 0.0);
  }

  SUBCASE("scalar single-layer case matches the hand-derived expression") {
    const SimGeometry tiny = small_stack(1, 1, 0);
    CMatrix f0 = feed_to_layer0(tiny, kLambda);
    f0.conservativeResize(1, 1);
    const CVector g = ue_channel(tiny, Vec3(0, 0, 10.0), kLambda);
    const SimPhaseConfig ph = random_phases(1, 1, 5);
    const double xi = 0.9;
    const CMatrix c = channel_uncertainty_covariance(f0, {}, g, ph, xi);
    const double expected = (1.0 - xi * xi) * std::norm(g[0]) * std::norm(f0(0, 0));
    CHECK(c(0, 0).real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(c(0, 0).imag()) < 1e-18);
  }

  SUBCASE("hermitian and positive semidefinite") {
    const double xi = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.2).xi;
    const CMatrix c =
        channel_uncertainty_covariance(links.f0, links.layers, links.g, phases, xi);
    CHECK((c - c.adjoint()).norm() < 1e-12 * c.norm());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(c);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("Monte Carlo covariance matches the recursion") {
  const SimGeometry geo = small_stack(4, 2, 1);  // N = 8, L = 1, M = 2
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(2, 8, 77);
  const PhaseErrorModel model = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1);
  const CVector mean_theory =
      mean_baseband_channel(links.f0, links.layers, links.g, phases, model.xi);
  const CMatrix cov_theory =
      channel_uncertainty_covariance(links.f0, links.layers, links.g, phases, model.xi);

  const long samples = 100000;
  RandomStream rng(991);
  CMatrix sum_outer = CMatrix::Zero(2, 2);
  CMatrix second = CMatrix::Zero(2, 2);
  for (long i = 0; i < samples; ++i) {
    const auto errors = sample_error_matrices(model, 2, 8, rng);
    const CMatrix realized = realized_cascade(links.f0, links.layers, phases, errors);
    const CVector h = (links.g.adjoint() * realized).adjoint();
    sum_outer += (h - mean_theory) * (h - mean_theory).adjoint();
    second += h * h.adjoint();
  }
  const CMatrix cov_emp = sum_outer / static_cast<double>(samples);
  CHECK((cov_emp - cov_theory).norm() / cov_theory.norm() < 0.05);

  // second-moment identity: E[h h^H] = C + mean mean^H
  const CMatrix second_theory = cov_theory + mean_theory * mean_theory.adjoint();
  CHECK((second / static_cast<double>(samples) - second_theory).norm() / second_theory.norm() <
        0.05);
}

TEST_CASE("mean attenuation follows xi^(L+1) exactly") {
  const SimGeometry geo = small_stack(3, 3, 2);
  const Links links = make_links(geo);
  const SimPhaseConfig phases = random_phases(3, 9, 55);
  const CVector base = mean_baseband_channel(links.f0, links.layers, links.g, phases, 1.0);
  for (double xi : {0.99, 0.9, 0.6}) {
    const CVector scaled = mean_baseband_channel(links.f0, links.layers, links.g, phases, xi);
    CHECK(scaled.norm() / base.norm() == doctest::Approx(std::pow(xi, 3)).epsilon(1e-12));
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const SimGeometry geo = small_stack(2, 2, 1);
  const Links links = make_links(geo);
  SimPhaseConfig wrong = zero_phases(1, 4);  // needs L+1 = 2 layers
  CHECK_THROWS_AS(nominal_cascade(links.f0, links.layers, wrong), std::invalid_argument);
  SimPhaseConfig bad_len = zero_phases(2, 3);
  CHECK_THROWS_AS(nominal_cascade(links.f0, links.layers, bad_len), std::invalid_argument);
}
