#pragma once

#include <stdexcept>
#include <vector>

#include "common.hpp"

namespace simbf {

// OFDM grid: K subcarriers spanning bandwidth B around carrier f_c,
//   f_k = f_c + (B/K) (k - (K+1)/2),  k = 1..K  (stored zero-based).
// noise_per_subcarrier_w already integrates the subchannel bandwidth B/K.
struct WidebandConfig {
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  int subcarriers = 1;
  double noise_per_subcarrier_w = 0.0;
  std::vector<double> tx_power_w;  // rho^(k), per subcarrier, watts

  double subcarrier_frequency(int k) const {
    return carrier_hz + bandwidth_hz / subcarriers * ((k + 1) - 0.5 * (subcarriers + 1));
  }
  double wavelength(int k) const { return kSpeedOfLight / subcarrier_frequency(k); }
  double center_wavelength() const { return kSpeedOfLight / carrier_hz; }

  void validate() const {
    if (!(carrier_hz > 0.0)) throw std::invalid_argument("wideband: carrier must be positive");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("wideband: bandwidth must be positive");
    if (subcarriers < 1) throw std::invalid_argument("wideband: subcarrier count must be >= 1");
    if (!(subcarrier_frequency(0) > 0.0)) {
      throw std::invalid_argument("wideband: lowest subcarrier frequency is not positive");
    }
    if (!(noise_per_subcarrier_w > 0.0)) {
      throw std::invalid_argument("wideband: noise power must be positive");
    }
    if (static_cast<int>(tx_power_w.size()) != subcarriers) {
      throw std::invalid_argument("wideband: per-subcarrier power list has wrong length");
    }
    for (double p : tx_power_w) {
      if (!(p >= 0.0)) throw std::invalid_argument("wideband: transmit power must be nonnegative");
    }
  }
};

}  // namespace simbf
