#pragma once

#include <vector>

#include "gskin/error.h"
#include "gskin/mesh.h"

namespace gskin {

// Open or capped tube with linearly interpolated radius (cone when the radii
// differ). Rings are listed cap-to-cap; `rings[i]` holds the vertex indices of
// ring i, `ring_centers` the axis points they circle.
struct Tube {
  Mesh mesh;
  std::vector<std::vector<int>> rings;
  Points ring_centers;
};

Tube make_tube(const Vec3& a, const Vec3& b, double radius_a, double radius_b,
               int n_ring, int n_rings_along, bool cap_a, bool cap_b);

inline Tube make_tube(const Vec3& a, const Vec3& b, double radius, int n_ring,
                      int n_rings_along, bool cap_a, bool cap_b) {
  return make_tube(a, b, radius, radius, n_ring, n_rings_along, cap_a, cap_b);
}

// Appends `piece` to `base`, offsetting face indices; returns the vertex-index
// offset the piece's vertices received. Labels are carried along when either
// side has them (missing side padded with `fill_label`).
int append_mesh(Mesh& base, const Mesh& piece, int fill_label = 0);

}  // namespace gskin
