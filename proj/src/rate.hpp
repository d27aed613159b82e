#pragma once

#include <span>
#include <vector>

#include "cascade.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "power_allocation.hpp"
#include "wideband.hpp"

namespace simbf {

struct RateReport {
  RMatrix rate;  // U x K, bits/s/Hz
  RMatrix sinr;  // U x K
  double average_rate = 0.0;  // (1/K) sum over users and subcarriers
};

// Spectral efficiency of one user on one subcarrier for an explicit
// precoding vector: log2(1 + rho_u |h^H S v|^2 / (v^H Q v + sigma^2)).
double user_rate(const CVector& mean, const CMatrix& coupling, const CVector& precoder,
                 const CMatrix& interference, double user_power, double noise_power);

// SINR achieved by the MMSE precoder in closed form:
// rho_u h^H S (Q + sigma^2 I)^-1 S^H h.
double mmse_sinr(const CVector& mean, const CMatrix& coupling, const CMatrix& interference,
                 double user_power, double noise_power);

// Rates over all users/subcarriers with the MMSE precoder, evaluated in the
// substituted closed form and cross-checked against the explicit-precoder
// expression to crosscheck_tol relative (a NumericError on disagreement).
// `user_power` holds rho_u^(k) in watts, U x K.
RateReport evaluate_rates(const BasebandChannelStats& stats, std::span<const CMatrix> coupling,
                          const RMatrix& user_power, double noise_power,
                          double crosscheck_tol = 1e-9);

// Saturation value of the sum rate as the transmit power grows without
// bound; only the share ratios p_u'/p_u enter. Sets *is_infinite (and
// returns +inf) when a user sees no interference-plus-distortion at all.
double high_snr_limit(const BasebandChannelStats& stats, std::span<const CMatrix> coupling,
                      std::span<const double> shares, bool* is_infinite = nullptr);

// Vanishing-spacing sum rate: the layer cascade collapses onto the diagonal
// phase accumulator Xi_k (the product of the layer responses and the
// facing-element propagation phases), giving closed forms for the mean
// channel and its uncertainty that are evaluated directly.
double zero_distance_limit(const SimGeometry& geometry, const WidebandConfig& wideband,
                           const ChannelSet& channels, const SimPhaseConfig& phases, double xi,
                           const RMatrix& user_power, double noise_power);

// Diagonal phase accumulator of the collapsed cascade for one subcarrier.
CVector zero_distance_accumulator(const SimGeometry& geometry, const SimPhaseConfig& phases,
                                  double wavelength);

// Average receive SNR axis: rho * c0 |r|^-2 / sigma^2 for the reference
// path-loss model, in dB.
double average_receive_snr_db(double total_power_w, double noise_total_w, double range_m,
                              double c0_db = -30.0);

}  // namespace simbf
