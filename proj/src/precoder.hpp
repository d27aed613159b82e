#pragma once

#include <span>
#include <vector>

#include "cascade.hpp"
#include "common.hpp"

namespace simbf {

// Interference-plus-distortion matrix seen by user u on one subcarrier:
//   Q_u = rho_u S^H C_u S + sum_{u' != u} rho_u' S^H (h_u' h_u'^H + C_u') S.
// `means`/`covariances` index users, `powers` holds rho_u in watts.
CMatrix interference_matrix(std::span<const CVector> means, std::span<const CMatrix> covariances,
                            const CMatrix& coupling, std::span<const double> powers, int user);

// MMSE transmit vector, unit norm:
//   v = (Q + sigma^2 I)^-1 S^H h_bar / |...|.
// A zero mean channel yields the first basis vector and sets *degenerate.
CVector mmse_precoder(const CVector& mean, const CMatrix& coupling, const CMatrix& interference,
                      double noise_power, bool* degenerate = nullptr);

}  // namespace simbf
