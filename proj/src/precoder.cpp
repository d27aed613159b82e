#include "precoder.hpp"

namespace simbf {

CMatrix interference_matrix(std::span<const CVector> means, std::span<const CMatrix> covariances,
                            const CMatrix& coupling, std::span<const double> powers, int user) {
  const int users = static_cast<int>(means.size());
  if (static_cast<int>(covariances.size()) != users || static_cast<int>(powers.size()) != users) {
    throw std::invalid_argument("interference_matrix: per-user input length mismatch");
  }
  if (user < 0 || user >= users) throw std::invalid_argument("interference_matrix: bad user index");
  const long m = coupling.rows();
  CMatrix inner = CMatrix::Zero(m, m);
  for (int u = 0; u < users; ++u) {
    if (!(powers[u] >= 0.0)) throw std::invalid_argument("interference_matrix: negative power");
    if (u == user) {
      inner += powers[u] * covariances[u];
    } else {
      inner += powers[u] * (means[u] * means[u].adjoint() + covariances[u]);
    }
  }
  CMatrix q = coupling.adjoint() * inner * coupling;
  q = 0.5 * (q + q.adjoint());
  return q;
}

CVector mmse_precoder(const CVector& mean, const CMatrix& coupling, const CMatrix& interference,
                      double noise_power, bool* degenerate) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("mmse_precoder: noise power must be positive");
  const long m = coupling.rows();
  if (degenerate) *degenerate = false;
  const CVector matched = coupling.adjoint() * mean;
  if (!(matched.norm() > 0.0)) {
    if (degenerate) *degenerate = true;
    CVector v = CVector::Zero(m);
    v[0] = 1.0;
    return v;
  }
  CMatrix system = interference + noise_power * CMatrix::Identity(m, m);
  Eigen::LDLT<CMatrix> ldlt(system);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("mmse_precoder: interference-plus-noise system is not positive definite");
  }
  CVector v = ldlt.solve(matched);
  return v / v.norm();
}

}  // namespace simbf
