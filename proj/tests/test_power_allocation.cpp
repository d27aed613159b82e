#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "power_allocation.hpp"
#include "rng.hpp"

using namespace simbf;

namespace {

// Classical waterfilling by bisection on the water level; independent of the
// active-set construction used by the implementation.
std::vector<double> waterfill_bisection(const std::vector<double>& gains) {
  const int users = static_cast<int>(gains.size());
  auto total = [&](double level) {
    double sum = 0.0;
    for (double g : gains) sum += std::max(level - 1.0 / g, 0.0);
    return sum;
  };
  double lo = 0.0, hi = 1.0;
  for (double g : gains) hi = std::max(hi, 1.0 / g + 1.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) > 1.0 ? hi : lo) = mid;
  }
  std::vector<double> shares(users);
  for (int u = 0; u < users; ++u) shares[u] = std::max(0.5 * (lo + hi) - 1.0 / gains[u], 0.0);
  return shares;
}

BasebandChannelStats stats_from(const std::vector<CVector>& means,
                                const std::vector<CMatrix>& covs) {
  BasebandChannelStats stats;
  for (size_t u = 0; u < means.size(); ++u) {
    stats.mean.push_back({means[u]});
    stats.covariance.push_back({covs[u]});
  }
  return stats;
}

}  // namespace

TEST_CASE("matched-filter gain without interference") {
  CVector mean(3);
  mean << 1.0, Complex(0, 2.0), -1.0;
  const double gain =
      effective_gain(mean, CMatrix::Identity(3, 3), CMatrix::Zero(3, 3), 0.5, 2.0);
  CHECK(gain == doctest::Approx(2.0 * mean.squaredNorm() / 0.5).epsilon(1e-12));
}

TEST_CASE("gain is linear in the total power") {
  CVector mean(2);
  mean << Complex(0.3, 0.1), Complex(-0.2, 0.9);
  CMatrix q(2, 2);
  q << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.8;
  const double g1 = effective_gain(mean, CMatrix::Identity(2, 2), q, 0.25, 1.0);
  const double g2 = effective_gain(mean, CMatrix::Identity(2, 2), q, 0.25, 2.0);
  CHECK(g2 == doctest::Approx(2.0 * g1).epsilon(1e-12));
  CHECK(g1 > 0.0);
}

TEST_CASE("waterfilling closed form") {
  SUBCASE("equal gains share equally") {
    const auto p = waterfill_step(std::vector<double>{3.0, 3.0, 3.0, 3.0});
    for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("a hopeless user is shut off") {
    const auto p = waterfill_step(std::vector<double>{10.0, 1e-9});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p[1] == 0.0);
  }
  SUBCASE("single user takes everything") {
    const auto p = waterfill_step(std::vector<double>{0.123});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("matches the bisection oracle on random gain sets") {
    RandomStream rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> gains;
      const int users = 2 + static_cast<int>(rng.uniform(0, 5));
      for (int u = 0; u < users; ++u) gains.push_back(std::pow(10.0, rng.uniform(-2, 3)));
      const auto mine = waterfill_step(gains);
      const auto oracle = waterfill_bisection(gains);
      double sum = 0.0;
      for (int u = 0; u < users; ++u) {
        CHECK(mine[u] == doctest::Approx(oracle[u]).epsilon(1e-6));
        CHECK(mine[u] >= 0.0);
        sum += mine[u];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("iterative waterfilling") {
  const CMatrix identity = CMatrix::Identity(4, 4);
  PowerSettings settings;

  SUBCASE("single user converges immediately to full power") {
    CVector mean(4);
    mean << 1.0, 0.5, Complex(0, 0.25), 0.0;
    const auto stats = stats_from({mean}, {CMatrix::Zero(4, 4)});
    std::vector<CMatrix> coupling{identity};
    std::vector<double> power{1.0};
    const PowerShares shares = iterative_waterfilling(stats, coupling, power, 1e-6, settings);
    CHECK(shares.shares(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(shares.iterations_used[0] == 1);
    CHECK(shares.converged);
  }

  SUBCASE("decoupled orthogonal users match classical waterfilling") {
    // orthogonal deterministic channels, no distortion: gains never move
    std::vector<CVector> means;
    for (int u = 0; u < 4; ++u) {
      CVector m = CVector::Zero(4);
      m[u] = 0.4 + 0.35 * u;
      means.push_back(m);
    }
    std::vector<CMatrix> covs(4, CMatrix::Zero(4, 4));
    const auto stats = stats_from(means, covs);
    std::vector<CMatrix> coupling{identity};
    std::vector<double> power{2.0};
    const double noise = 0.05;
    const PowerShares shares = iterative_waterfilling(stats, coupling, power, noise, settings);
    std::vector<double> gains;
    for (int u = 0; u < 4; ++u) gains.push_back(2.0 * means[u].squaredNorm() / noise);
    const auto oracle = waterfill_bisection(gains);
    for (int u = 0; u < 4; ++u) {
      CHECK(shares.shares(u, 0) == doctest::Approx(oracle[u]).epsilon(1e-8));
    }
    // simplex feasibility along the whole trajectory
    for (const auto& p : shares.trajectory) {
      CHECK(p.minCoeff() >= 0.0);
      CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("symmetric users split evenly") {
    CVector m1(4), m2(4);
    m1 << 1.0, 0.5, 0.0, 0.0;
    m2 << 0.0, 0.0, 1.0, 0.5;  // mirrored supports, equal norms
    const auto stats = stats_from({m1, m2}, {CMatrix::Zero(4, 4), CMatrix::Zero(4, 4)});
    std::vector<CMatrix> coupling{identity};
    std::vector<double> power{1.0};
    const PowerShares shares = iterative_waterfilling(stats, coupling, power, 0.1, settings);
    CHECK(shares.shares(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(shares.shares(1, 0) == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("fixed point: one more step does not move the shares") {
    RandomStream rng(77);
    std::vector<CVector> means;
    std::vector<CMatrix> covs;
    for (int u = 0; u < 3; ++u) {
      CVector m(4);
      for (int i = 0; i < 4; ++i) m[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      means.push_back(m);
      CMatrix a(4, 4);
      for (int i = 0; i < 16; ++i) *(a.data() + i) = Complex(rng.uniform(-0.1, 0.1), 0.0);
      covs.push_back(CMatrix(a * a.adjoint()));
    }
    const auto stats = stats_from(means, covs);
    std::vector<CMatrix> coupling{identity};
    std::vector<double> power{1.0};
    const PowerShares shares = iterative_waterfilling(stats, coupling, power, 0.01, settings);
    REQUIRE(shares.converged);
    const auto& last = shares.trajectory.back();
    const auto& prev = shares.trajectory[shares.trajectory.size() - 2];
    CHECK((last - prev).lpNorm<Eigen::Infinity>() < settings.tolerance);
  }

  SUBCASE("shared mode uses one share vector across subcarriers") {
    CVector m1(4), m2(4);
    m1 << 1.0, 0.2, 0.0, 0.0;
    m2 << 0.0, 0.0, 0.8, 0.3;
    BasebandChannelStats stats;
    stats.mean = {{m1, 0.5 * m1}, {m2, 2.0 * m2}};
    stats.covariance = {{CMatrix::Zero(4, 4), CMatrix::Zero(4, 4)},
                        {CMatrix::Zero(4, 4), CMatrix::Zero(4, 4)}};
    std::vector<CMatrix> coupling{identity, identity};
    std::vector<double> power{1.0, 1.0};
    PowerSettings shared = settings;
    shared.coupling = PowerCoupling::Shared;
    const PowerShares shares = iterative_waterfilling(stats, coupling, power, 0.1, shared);
    CHECK(shares.shares(0, 0) == doctest::Approx(shares.shares(0, 1)).epsilon(1e-15));
    CHECK(shares.shares(1, 0) == doctest::Approx(shares.shares(1, 1)).epsilon(1e-15));
    CHECK(shares.iterations_used.size() == 1);
  }
}
