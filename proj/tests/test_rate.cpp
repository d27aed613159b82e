#include <cmath>

#include <doctest.h>

#include "phase_error.hpp"
#include "precoder.hpp"
#include "rate.hpp"
#include "rng.hpp"

using namespace simbf;

namespace {

constexpr double kLambda = 0.03;

SimGeometry stack(int nx, int ny, int layers) {
  GeometryConfig c;
  c.feeds_x = 2;
  c.feeds_y = 2;
  c.feed_spacing_x = kLambda / 2;
  c.feed_spacing_y = kLambda / 2;
  c.elements_x = nx;
  c.elements_y = ny;
  c.element_size_x = kLambda / 4;
  c.element_size_y = kLambda / 4;
  c.layer_spacings.assign(layers, 5 * kLambda);
  return build_urpa_geometry(c);
}

WidebandConfig wideband(int k) {
  WidebandConfig w;
  w.carrier_hz = kSpeedOfLight / kLambda;
  w.bandwidth_hz = 6e8;
  w.subcarriers = k;
  w.noise_per_subcarrier_w = 1e-12;
  w.tx_power_w.assign(k, 1.0 / k);
  return w;
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

CVector random_cvector(int n, RandomStream& rng) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return v;
}

}  // namespace

TEST_CASE("zero allocated power means zero rate") {
  CVector mean(2);
  mean << 1.0, 0.5;
  CVector v(2);
  v << 1.0, 0.0;
  CHECK(user_rate(mean, CMatrix::Identity(2, 2), v, CMatrix::Zero(2, 2), 0.0, 0.1) == 0.0);
}

TEST_CASE("textbook single-user beamforming rate") {
  CVector mean(3);
  mean << 0.6, Complex(0, 0.3), -0.2;
  const CVector v = mean / mean.norm();
  const double rho = 2.0, noise = 0.05;
  const double rate = user_rate(mean, CMatrix::Identity(3, 3), v, CMatrix::Zero(3, 3), rho, noise);
  CHECK(rate == doctest::Approx(std::log2(1.0 + rho * mean.squaredNorm() / noise)).epsilon(1e-12));
}

TEST_CASE("doubling the noise halves the SINR when interference-free") {
  CVector mean(2);
  mean << 1.0, 0.5;
  const CVector v = mean / mean.norm();
  const double r1 = user_rate(mean, CMatrix::Identity(2, 2), v, CMatrix::Zero(2, 2), 1.0, 0.1);
  const double r2 = user_rate(mean, CMatrix::Identity(2, 2), v, CMatrix::Zero(2, 2), 1.0, 0.2);
  CHECK(std::exp2(r1) - 1.0 == doctest::Approx(2.0 * (std::exp2(r2) - 1.0)).epsilon(1e-12));
}

TEST_CASE("substituted MMSE rate equals the explicit-precoder rate") {
  RandomStream rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 4, users = 3;
    BasebandChannelStats stats;
    RMatrix power(users, 1);
    for (int u = 0; u < users; ++u) {
      stats.mean.push_back({random_cvector(m, rng)});
      CMatrix a(m, m);
      for (int i = 0; i < m * m; ++i) {
        *(a.data() + i) = Complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
      }
      stats.covariance.push_back({CMatrix(a * a.adjoint())});
      power(u, 0) = rng.uniform(0.1, 2.0);
    }
    std::vector<CMatrix> coupling{CMatrix::Identity(m, m)};
    // evaluate_rates throws if the two routes disagree beyond 1e-9
    const RateReport report = evaluate_rates(stats, coupling, power, 0.01);
    CHECK(report.rate.minCoeff() >= 0.0);
    CHECK(report.average_rate == doctest::Approx(report.rate.sum()).epsilon(1e-12));
  }
}

TEST_CASE("noise-limited rate keeps the 3 dB per bit slope without errors") {
  CVector mean(2);
  mean << 0.8, 0.1;
  BasebandChannelStats stats;
  stats.mean = {{mean}};
  stats.covariance = {{CMatrix::Zero(2, 2)}};
  std::vector<CMatrix> coupling{CMatrix::Identity(2, 2)};
  double previous = 0.0;
  for (double rho : {1.0, 2.0, 4.0, 8.0}) {
    RMatrix power(1, 1);
    power(0, 0) = rho;
    const double rate = evaluate_rates(stats, coupling, power, 1e-6).average_rate;
    if (previous > 0.0) CHECK(rate - previous == doctest::Approx(1.0).epsilon(1e-4));
    previous = rate;
  }
}

TEST_CASE("high-SNR limit") {
  const SimGeometry geo = stack(4, 4, 2);
  const WidebandConfig w = wideband(2);
  const ChannelSet channels =
      build_channel_set(geo, w, {Vec3(0, 0, 10.0)}, ChannelBuildOptions{}, 1);
  const SimPhaseConfig phases = random_phases(3, 16, 11);

  SUBCASE("error-free single user grows without bound") {
    const BasebandChannelStats stats = compute_baseband_stats(channels, phases, 1.0, 1);
    bool infinite = false;
    const double limit = high_snr_limit(stats, channels.coupling, std::vector<double>{1.0},
                                        &infinite);
    CHECK(infinite);
    CHECK(std::isinf(limit));
  }

  SUBCASE("with phase errors the rate saturates at the predicted value") {
    const PhaseErrorModel model = phase_error_from_variance(PhaseErrorFamily::VonMises, 0.01);
    const BasebandChannelStats stats = compute_baseband_stats(channels, phases, model.xi, 1);
    bool infinite = true;
    const double limit = high_snr_limit(stats, channels.coupling, std::vector<double>{1.0},
                                        &infinite);
    CHECK_FALSE(infinite);
    CHECK(limit > 0.0);
    // drive the finite-power rate far into saturation: rho = 1e12 x noise-matched level
    const double hnorm = stats.mean[0][0].squaredNorm();
    RMatrix power(1, 2);
    power.setConstant(1e12 * w.noise_per_subcarrier_w / hnorm);
    const double rate =
        evaluate_rates(stats, channels.coupling, power, w.noise_per_subcarrier_w).average_rate;
    CHECK(rate == doctest::Approx(limit).epsilon(1e-3));
  }

  SUBCASE("only the share ratios matter") {
    const PhaseErrorModel model = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1);
    const ChannelSet two_users = build_channel_set(
        geo, w, {Vec3(0, 0, 10.0), Vec3(1.5, 0, 12.0)}, ChannelBuildOptions{}, 1);
    const BasebandChannelStats stats = compute_baseband_stats(two_users, phases, model.xi, 1);
    const double a = high_snr_limit(stats, two_users.coupling, std::vector<double>{0.25, 0.75});
    const double b = high_snr_limit(stats, two_users.coupling, std::vector<double>{1.0, 3.0});
    CHECK(std::isfinite(a));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("vanishing-spacing limit") {
  const SimGeometry geo = stack(3, 3, 2);
  const WidebandConfig w = wideband(3);
  const std::vector<Vec3> users{Vec3(0, 0, 10.0), Vec3(2.0, 0, 12.0)};
  const ChannelSet channels = build_channel_set(geo, w, users, ChannelBuildOptions{}, 1);
  const double xi = phase_error_from_variance(PhaseErrorFamily::Uniform, 0.1).xi;
  const SimPhaseConfig phases = random_phases(3, 9, 17);
  RMatrix power(2, 3);
  power.setConstant(0.5 / 3);

  SUBCASE("closed form equals the pipeline on the diagonal cascade") {
    const double closed =
        zero_distance_limit(geo, w, channels, phases, xi, power, w.noise_per_subcarrier_w);
    const ChannelSet diagonal = build_diagonal_channel_set(geo, w, users, ChannelBuildOptions{});
    const BasebandChannelStats stats = compute_baseband_stats(diagonal, phases, xi, 1);
    const double generic =
        evaluate_rates(stats, diagonal.coupling, power, w.noise_per_subcarrier_w).average_rate;
    CHECK(closed == doctest::Approx(generic).epsilon(1e-9));
  }

  SUBCASE("phase choice canceling the axial path makes the accumulator the identity") {
    SimPhaseConfig aligned = zero_phases(3, 9);
    const double k_c = 2.0 * kPi / w.center_wavelength();
    for (int i = 0; i < 9; ++i) {
      double path = 0.0;
      for (int l = 1; l <= 2; ++l) {
        path += (geo.elements[l][i] - geo.elements[l - 1][i]).norm();
      }
      aligned.theta[0][i] = std::fmod(k_c * path, 2.0 * kPi);
    }
    const CVector acc = zero_distance_accumulator(geo, aligned, w.center_wavelength());
    CHECK((acc - CVector::Ones(9)).norm() < 1e-9);
  }

  SUBCASE("error-free stacks lose the distortion floor") {
    const double clean =
        zero_distance_limit(geo, w, channels, phases, 1.0, power, w.noise_per_subcarrier_w);
    const double noisy =
        zero_distance_limit(geo, w, channels, phases, xi, power, w.noise_per_subcarrier_w);
    CHECK(clean > noisy);
  }
}

TEST_CASE("receive SNR axis") {
  // 0 dBm, -30 dB at 1 m, 20 m range, 1e-9 W total noise
  const double snr = average_receive_snr_db(1e-3, 1e-9, 20.0);
  CHECK(snr == doctest::Approx(10.0 * std::log10(1e-3 * 1e-3 / 400.0 / 1e-9)).epsilon(1e-12));
}
