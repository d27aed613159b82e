#pragma once

#include <utility>
#include <vector>

#include "common.hpp"

namespace simbf {

// Physical layout of the metasurface stack: an input layer (layer 0) carrying
// the feeds plus `layers` intermediate refractive layers, all sharing the same
// element grid. Grids are centered on the z axis; layer l sits at
// z = d_1 + ... + d_l, the feeds at z = -feed_z_offset.
struct GeometryConfig {
  int feeds_x = 1;
  int feeds_y = 1;
  double feed_spacing_x = 0.0;  // meters
  double feed_spacing_y = 0.0;
  int elements_x = 1;
  int elements_y = 1;
  double element_size_x = 0.0;  // meters
  double element_size_y = 0.0;
  std::vector<double> layer_spacings;  // d_1..d_L, meters
  double feed_z_offset = 0.0;          // meters; 0 keeps the feeds in the layer-0 plane
};

struct SimGeometry {
  GeometryConfig config;
  std::vector<Vec3> feeds;                  // size M = feeds_x * feeds_y
  std::vector<std::vector<Vec3>> elements;  // [layer 0..L][n], size N each
  std::vector<double> layer_z;              // z coordinate per layer

  int num_feeds() const { return static_cast<int>(feeds.size()); }
  int num_elements() const { return static_cast<int>(elements.front().size()); }
  int num_layers() const { return static_cast<int>(elements.size()) - 1; }  // L

  // Aperture diagonal including element extents; the usual "maximum physical
  // dimension" D of the radiating surface.
  double aperture_diagonal() const;
};

SimGeometry build_urpa_geometry(const GeometryConfig& config);

// Fixed row-major indexing, x fastest: n = iy * elements_x + ix.
int element_index(const GeometryConfig& config, int ix, int iy);
std::pair<int, int> element_grid_position(const GeometryConfig& config, int n);

// Fraunhofer distance 2 D^2 / lambda of the outermost layer's aperture.
double rayleigh_distance(const SimGeometry& geometry, double wavelength);

enum class FieldRegion { ReactiveNearField, RadiativeNearField, FarField };

const char* field_region_name(FieldRegion region);

// Classifies a point against the Fresnel boundary 0.62 sqrt(D^3/lambda) and
// the Rayleigh distance 2 D^2 / lambda, measured from the center of the
// outermost layer.
FieldRegion field_region(const SimGeometry& geometry, double wavelength, const Vec3& point);

// Users must keep a nonzero offset from the outermost layer plane.
void validate_ue_positions(const SimGeometry& geometry, const std::vector<Vec3>& positions);

}  // namespace simbf
