#pragma once

#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace simbf {

enum class PhaseErrorFamily { None, Uniform, VonMises };

const char* phase_error_family_name(PhaseErrorFamily family);

// Per-element phase tuning error model. All elements and layers draw i.i.d.
// from the same zero-mean family. `xi` is the first circular moment
// E[exp(j theta)] in (0, 1]; it attenuates the mean cascade by xi^(L+1).
struct PhaseErrorModel {
  PhaseErrorFamily family = PhaseErrorFamily::None;
  double parameter = 0.0;  // uniform half-width iota, or von Mises concentration kappa
  double sigma_sq = 0.0;   // error variance, rad^2
  double xi = 1.0;
};

// sigma_sq -> distribution parameter:
//   uniform:   iota = sqrt(3 sigma^2), requires sigma^2 <= pi^2/3
//   von Mises: kappa = 1 / sigma^2
// sigma_sq == 0 collapses to the error-free model regardless of family.
PhaseErrorModel phase_error_from_variance(PhaseErrorFamily family, double sigma_sq);

// Distribution parameter -> model (iota in (0, pi], kappa > 0).
PhaseErrorModel phase_error_from_parameter(PhaseErrorFamily family, double parameter);

// E[exp(j theta)]: sin(iota)/iota for uniform, I1(kappa)/I0(kappa) for von Mises.
double xi_factor(const PhaseErrorModel& model);

// One draw of the phase tuning error, radians.
double sample_phase_error(const PhaseErrorModel& model, RandomStream& rng);

// Diagonal error factors exp(j theta~) for layers 0..num_layers-1, each of
// length n. The identity for the error-free model.
std::vector<CVector> sample_error_matrices(const PhaseErrorModel& model, int num_layers, int n,
                                           RandomStream& rng);

}  // namespace simbf
