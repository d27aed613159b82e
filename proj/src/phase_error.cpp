#include "phase_error.hpp"

#include <cmath>

#include "special_functions.hpp"

namespace simbf {

const char* phase_error_family_name(PhaseErrorFamily family) {
  switch (family) {
    case PhaseErrorFamily::None: return "none";
    case PhaseErrorFamily::Uniform: return "uniform";
    case PhaseErrorFamily::VonMises: return "von_mises";
  }
  return "unknown";
}

PhaseErrorModel phase_error_from_variance(PhaseErrorFamily family, double sigma_sq) {
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("phase_error: variance must be nonnegative");
  if (sigma_sq == 0.0 || family == PhaseErrorFamily::None) {
    if (family != PhaseErrorFamily::None && sigma_sq > 0.0) {
      throw std::invalid_argument("phase_error: family 'none' cannot carry a positive variance");
    }
    return PhaseErrorModel{};
  }
  if (family == PhaseErrorFamily::Uniform) {
    if (sigma_sq > kPi * kPi / 3.0) {
      throw std::invalid_argument("phase_error: uniform variance exceeds pi^2/3 support bound");
    }
    return phase_error_from_parameter(family, std::sqrt(3.0 * sigma_sq));
  }
  return phase_error_from_parameter(family, 1.0 / sigma_sq);
}

PhaseErrorModel phase_error_from_parameter(PhaseErrorFamily family, double parameter) {
  PhaseErrorModel model;
  model.family = family;
  model.parameter = parameter;
  switch (family) {
    case PhaseErrorFamily::None:
      return PhaseErrorModel{};
    case PhaseErrorFamily::Uniform:
      if (!(parameter > 0.0) || parameter > kPi) {
        throw std::invalid_argument("phase_error: uniform half-width must lie in (0, pi]");
      }
      model.sigma_sq = parameter * parameter / 3.0;
      break;
    case PhaseErrorFamily::VonMises:
      if (!(parameter > 0.0)) {
        throw std::invalid_argument("phase_error: von Mises concentration must be positive");
      }
      model.sigma_sq = 1.0 / parameter;
      break;
  }
  model.xi = xi_factor(model);
  return model;
}

double xi_factor(const PhaseErrorModel& model) {
  switch (model.family) {
    case PhaseErrorFamily::None:
      return 1.0;
    case PhaseErrorFamily::Uniform:
      if (!(model.parameter > 0.0)) {
        throw std::invalid_argument("phase_error: uniform half-width must be positive");
      }
      return std::sin(model.parameter) / model.parameter;
    case PhaseErrorFamily::VonMises:
      return bessel_i1_i0_ratio(model.parameter);
  }
  return 1.0;
}

namespace {

// Best–Fisher rejection sampler for a zero-mean von Mises angle.
double sample_von_mises(double kappa, RandomStream& rng) {
  const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
  const double r = (1.0 + b * b) / (2.0 * b);
  for (;;) {
    const double u1 = rng.canonical();
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    const double u2 = rng.canonical();
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double u3 = rng.canonical();
      return (u3 > 0.5 ? 1.0 : -1.0) * std::acos(f);
    }
  }
}

}  // namespace

double sample_phase_error(const PhaseErrorModel& model, RandomStream& rng) {
  switch (model.family) {
    case PhaseErrorFamily::None:
      return 0.0;
    case PhaseErrorFamily::Uniform:
      return rng.uniform(-model.parameter, model.parameter);
    case PhaseErrorFamily::VonMises:
      return sample_von_mises(model.parameter, rng);
  }
  return 0.0;
}

std::vector<CVector> sample_error_matrices(const PhaseErrorModel& model, int num_layers, int n,
                                           RandomStream& rng) {
  std::vector<CVector> layers(num_layers);
  for (auto& layer : layers) {
    layer.resize(n);
    if (model.family == PhaseErrorFamily::None) {
      layer.setOnes();
    } else {
      for (int i = 0; i < n; ++i) layer[i] = unit_phasor(sample_phase_error(model, rng));
    }
  }
  return layers;
}

}  // namespace simbf
