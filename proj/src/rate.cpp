#include "rate.hpp"

#include <cmath>
#include <limits>

#include "precoder.hpp"

namespace simbf {

double user_rate(const CVector& mean, const CMatrix& coupling, const CVector& precoder,
                 const CMatrix& interference, double user_power, double noise_power) {
  if (!(user_power >= 0.0)) throw std::invalid_argument("user_rate: negative power");
  const Complex signal = mean.adjoint() * coupling * precoder;
  const Complex leak = precoder.adjoint() * interference * precoder;
  const double sinr = user_power * std::norm(signal) / (leak.real() + noise_power);
  return std::log2(1.0 + sinr);
}

double mmse_sinr(const CVector& mean, const CMatrix& coupling, const CMatrix& interference,
                 double user_power, double noise_power) {
  const long m = coupling.rows();
  const CVector matched = coupling.adjoint() * mean;
  CMatrix system = interference + noise_power * CMatrix::Identity(m, m);
  Eigen::LDLT<CMatrix> ldlt(system);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("mmse_sinr: interference-plus-noise system is not positive definite");
  }
  const Complex quad = matched.adjoint() * ldlt.solve(matched);
  return user_power * quad.real();
}

RateReport evaluate_rates(const BasebandChannelStats& stats, std::span<const CMatrix> coupling,
                          const RMatrix& user_power, double noise_power, double crosscheck_tol) {
  const int users = static_cast<int>(stats.mean.size());
  const int k_count = users > 0 ? static_cast<int>(stats.mean.front().size()) : 0;
  if (user_power.rows() != users || user_power.cols() != k_count) {
    throw std::invalid_argument("evaluate_rates: power matrix shape mismatch");
  }
  RateReport report;
  report.rate.setZero(users, k_count);
  report.sinr.setZero(users, k_count);
  std::vector<CVector> means(users);
  std::vector<CMatrix> covs(users);
  std::vector<double> powers(users);
  for (int k = 0; k < k_count; ++k) {
    for (int u = 0; u < users; ++u) {
      means[u] = stats.mean[u][k];
      covs[u] = stats.covariance[u][k];
      powers[u] = user_power(u, k);
    }
    for (int u = 0; u < users; ++u) {
      const CMatrix q = interference_matrix(means, covs, coupling[k], powers, u);
      const double sinr = mmse_sinr(means[u], coupling[k], q, powers[u], noise_power);
      const CVector v = mmse_precoder(means[u], coupling[k], q, noise_power);
      const double direct = user_rate(means[u], coupling[k], v, q, powers[u], noise_power);
      const double substituted = std::log2(1.0 + sinr);
      const double scale = std::max({std::abs(direct), std::abs(substituted), 1e-300});
      if (std::abs(direct - substituted) > crosscheck_tol * scale) {
        throw NumericError("evaluate_rates: closed-form and explicit-precoder rates disagree");
      }
      report.sinr(u, k) = sinr;
      report.rate(u, k) = substituted;
    }
  }
  report.average_rate = report.rate.sum() / k_count;
  return report;
}

double high_snr_limit(const BasebandChannelStats& stats, std::span<const CMatrix> coupling,
                      std::span<const double> shares, bool* is_infinite) {
  const int users = static_cast<int>(stats.mean.size());
  const int k_count = users > 0 ? static_cast<int>(stats.mean.front().size()) : 0;
  if (static_cast<int>(shares.size()) != users) {
    throw std::invalid_argument("high_snr_limit: share vector length mismatch");
  }
  if (is_infinite) *is_infinite = false;
  double sum_rate = 0.0;
  for (int k = 0; k < k_count; ++k) {
    for (int u = 0; u < users; ++u) {
      if (!(shares[u] > 0.0)) throw std::invalid_argument("high_snr_limit: shares must be positive");
      const long m = coupling[k].rows();
      CMatrix inner = stats.covariance[u][k];
      for (int v = 0; v < users; ++v) {
        if (v == u) continue;
        inner += shares[v] / shares[u] *
                 (stats.mean[v][k] * stats.mean[v][k].adjoint() + stats.covariance[v][k]);
      }
      CMatrix limit_interference = coupling[k].adjoint() * inner * coupling[k];
      limit_interference = 0.5 * (limit_interference + limit_interference.adjoint());
      const CVector matched = coupling[k].adjoint() * stats.mean[u][k];

      // Eigen-space solve: components of the matched channel that fall in
      // the null space of the interference make the limit infinite.
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(limit_interference);
      if (eig.info() != Eigen::Success) throw NumericError("high_snr_limit: eigensolver failed");
      const double lambda_max = eig.eigenvalues().maxCoeff();
      const double threshold = lambda_max * m * 1e-13;  // relative rank cut
      double sinr = 0.0;
      bool infinite = false;
      for (long i = 0; i < m; ++i) {
        const double coef = std::norm(Complex(eig.eigenvectors().col(i).adjoint() * matched));
        if (eig.eigenvalues()[i] > threshold) {
          sinr += coef / eig.eigenvalues()[i];
        } else if (coef > matched.squaredNorm() * 1e-14) {
          infinite = true;
        }
      }
      if (infinite) {
        if (is_infinite) *is_infinite = true;
        return std::numeric_limits<double>::infinity();
      }
      sum_rate += std::log2(1.0 + sinr);
    }
  }
  return sum_rate / k_count;
}

CVector zero_distance_accumulator(const SimGeometry& geometry, const SimPhaseConfig& phases,
                                  double wavelength) {
  const int n = geometry.num_elements();
  const int layers = geometry.num_layers();
  if (phases.num_layers() != layers) {
    throw std::invalid_argument("zero_distance_accumulator: phase config layer mismatch");
  }
  const double wavenumber = 2.0 * kPi / wavelength;
  CVector xi_diag(n);
  for (int i = 0; i < n; ++i) {
    double angle = phases.theta[0][i];
    for (int l = 1; l <= layers; ++l) {
      angle += phases.theta[l][i] -
               wavenumber * (geometry.elements[l][i] - geometry.elements[l - 1][i]).norm();
    }
    xi_diag[i] = unit_phasor(angle);
  }
  return xi_diag;
}

double zero_distance_limit(const SimGeometry& geometry, const WidebandConfig& wideband,
                           const ChannelSet& channels, const SimPhaseConfig& phases, double xi,
                           const RMatrix& user_power, double noise_power) {
  const int users = static_cast<int>(channels.ue_links.size());
  const int k_count = channels.subcarriers;
  if (user_power.rows() != users || user_power.cols() != k_count) {
    throw std::invalid_argument("zero_distance_limit: power matrix shape mismatch");
  }
  const int total_layers = geometry.num_layers() + 1;
  const double mean_scale = std::pow(xi, total_layers);
  const double residual = 1.0 - mean_scale * mean_scale;

  double sum_rate = 0.0;
  std::vector<CVector> means(users);
  std::vector<CMatrix> covs(users);
  std::vector<double> powers(users);
  for (int k = 0; k < k_count; ++k) {
    const CVector accumulator = zero_distance_accumulator(geometry, phases, wideband.wavelength(k));
    const CMatrix& f0 = channels.feed_links[k];
    for (int u = 0; u < users; ++u) {
      const CVector& g = channels.ue_links[u][k];
      means[u] = mean_scale * (f0.adjoint() * accumulator.conjugate().cwiseProduct(g));
      const CVector weights = g.cwiseAbs2().cast<Complex>();
      covs[u] = residual * (f0.adjoint() * weights.asDiagonal() * f0);
      powers[u] = user_power(u, k);
    }
    for (int u = 0; u < users; ++u) {
      const CMatrix q = interference_matrix(means, covs, channels.coupling[k], powers, u);
      const double sinr = mmse_sinr(means[u], channels.coupling[k], q, powers[u], noise_power);
      sum_rate += std::log2(1.0 + sinr);
    }
  }
  return sum_rate / k_count;
}

double average_receive_snr_db(double total_power_w, double noise_total_w, double range_m,
                              double c0_db) {
  const double path_loss = db_to_linear(c0_db) / (range_m * range_m);
  return 10.0 * std::log10(total_power_w * path_loss / noise_total_w);
}

}  // namespace simbf
