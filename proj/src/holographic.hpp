#pragma once

#include <span>
#include <vector>

#include "cascade.hpp"
#include "common.hpp"

namespace simbf {

struct OptimizerSettings {
  double epsilon = 1e-4;  // absolute stop threshold on sum of channel gains
  int max_sweeps = 4;
  uint64_t seed = 0;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("optimizer: epsilon must be positive");
    if (max_sweeps < 1) throw std::invalid_argument("optimizer: max sweeps must be >= 1");
  }
};

struct OptimizerTrace {
  double initial_objective = 0.0;
  std::vector<double> objective_per_sweep;   // after each full layer sweep
  std::vector<double> objective_per_update;  // after each single layer update
  int sweeps_used = 0;
};

// Layer-l factorization of the sum-gain objective with every other layer
// frozen: `downstream` is the channel from layer l to the UE (with its share
// of the xi attenuation), `upstream` the channel from the RF chains through
// the current mean channel used as combining weights. The layer's
// contribution is |downstream^H Diag(e^{j theta}) upstream|^2.
struct EquivalentSplit {
  CVector downstream;  // length N
  CVector upstream;    // length N
};

EquivalentSplit equivalent_split(const CMatrix& feed_link, std::span<const CMatrix> layers,
                                 const CVector& ue_link, const SimPhaseConfig& phases, double xi,
                                 int layer);

// One alternating update: rows z_u^H = downstream^H o upstream^T stacked
// into Z, phases taken from the principal eigenvector of Z^H Z. Exact via
// the U x U Gram matrix for small user counts, power iteration otherwise.
RVector layer_update(const std::vector<EquivalentSplit>& splits);

// Sum of per-user mean channel gains at the center frequency for the given
// phases; the quantity the sweeps maximize and the traces record.
double sum_channel_gain(const CMatrix& feed_link, std::span<const CMatrix> layers,
                        std::span<const CVector> ue_links, const SimPhaseConfig& phases, double xi);

// Layer-by-layer alternating optimization of all phase layers at the center
// frequency, starting from seeded uniform random phases. Stops when the
// objective changes by less than epsilon over a sweep or after max_sweeps.
std::pair<SimPhaseConfig, OptimizerTrace> optimize_phases(const CMatrix& feed_link,
                                                          std::span<const CMatrix> layers,
                                                          std::span<const CVector> ue_links,
                                                          double xi,
                                                          const OptimizerSettings& settings);

}  // namespace simbf
