#include "geometry.hpp"

#include <cmath>
#include <string>

namespace simbf {

namespace {

void validate_config(const GeometryConfig& c) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("geometry: " + msg); };
  if (c.feeds_x < 1 || c.feeds_y < 1) fail("feed counts must be >= 1");
  if (c.elements_x < 1 || c.elements_y < 1) fail("element counts must be >= 1");
  if (!(c.feed_spacing_x > 0.0) || !(c.feed_spacing_y > 0.0)) fail("feed spacings must be positive");
  if (!(c.element_size_x > 0.0) || !(c.element_size_y > 0.0)) fail("element sizes must be positive");
  for (double d : c.layer_spacings) {
    if (!(d >= 0.0)) fail("layer spacings must be nonnegative");
  }
  if (!(c.feed_z_offset >= 0.0)) fail("feed z offset must be nonnegative");
}

std::vector<Vec3> centered_grid(int nx, int ny, double dx, double dy, double z) {
  std::vector<Vec3> points;
  points.reserve(static_cast<size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      points.emplace_back((ix - 0.5 * (nx - 1)) * dx, (iy - 0.5 * (ny - 1)) * dy, z);
    }
  }
  return points;
}

}  // namespace

SimGeometry build_urpa_geometry(const GeometryConfig& config) {
  validate_config(config);
  SimGeometry g;
  g.config = config;
  g.feeds = centered_grid(config.feeds_x, config.feeds_y, config.feed_spacing_x,
                          config.feed_spacing_y, -config.feed_z_offset);
  const int layers = static_cast<int>(config.layer_spacings.size());
  double z = 0.0;
  g.layer_z.push_back(z);
  g.elements.push_back(centered_grid(config.elements_x, config.elements_y, config.element_size_x,
                                     config.element_size_y, z));
  for (int l = 0; l < layers; ++l) {
    z += config.layer_spacings[l];
    g.layer_z.push_back(z);
    g.elements.push_back(centered_grid(config.elements_x, config.elements_y, config.element_size_x,
                                       config.element_size_y, z));
  }
  return g;
}

int element_index(const GeometryConfig& config, int ix, int iy) {
  return iy * config.elements_x + ix;
}

std::pair<int, int> element_grid_position(const GeometryConfig& config, int n) {
  return {n % config.elements_x, n / config.elements_x};
}

double SimGeometry::aperture_diagonal() const {
  const double wx = config.elements_x * config.element_size_x;
  const double wy = config.elements_y * config.element_size_y;
  return std::hypot(wx, wy);
}

double rayleigh_distance(const SimGeometry& geometry, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("rayleigh_distance: wavelength must be positive");
  const double d = geometry.aperture_diagonal();
  return 2.0 * d * d / wavelength;
}

const char* field_region_name(FieldRegion region) {
  switch (region) {
    case FieldRegion::ReactiveNearField: return "reactive-near-field";
    case FieldRegion::RadiativeNearField: return "radiative-near-field";
    case FieldRegion::FarField: return "far-field";
  }
  return "unknown";
}

FieldRegion field_region(const SimGeometry& geometry, double wavelength, const Vec3& point) {
  const double d = geometry.aperture_diagonal();
  const Vec3 aperture_center(0.0, 0.0, geometry.layer_z.back());
  const double r = (point - aperture_center).norm();
  const double fresnel = 0.62 * std::sqrt(d * d * d / wavelength);
  if (r >= rayleigh_distance(geometry, wavelength)) return FieldRegion::FarField;
  if (r >= fresnel) return FieldRegion::RadiativeNearField;
  return FieldRegion::ReactiveNearField;
}

void validate_ue_positions(const SimGeometry& geometry, const std::vector<Vec3>& positions) {
  const double plane_z = geometry.layer_z.back();
  for (size_t u = 0; u < positions.size(); ++u) {
    if (std::abs(positions[u].z() - plane_z) <= 0.0) {
      throw std::invalid_argument("geometry: UE " + std::to_string(u) +
                                  " lies in the outermost layer plane");
    }
  }
}

}  // namespace simbf
