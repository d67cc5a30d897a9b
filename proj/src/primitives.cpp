#include "gskin/primitives.h"

#include <cmath>

namespace gskin {

Tube make_tube(const Vec3& a, const Vec3& b, double radius_a, double radius_b,
               int n_ring, int n_rings_along, bool cap_a, bool cap_b) {
  if (n_ring < 3) throw ValidationError("tube needs at least 3 vertices per ring");
  if (n_rings_along < 2) throw ValidationError("tube needs at least 2 rings");
  const Vec3 axis = b - a;
  const double len = axis.norm();
  if (len < 1e-12) throw ValidationError("tube endpoints coincide");
  const Vec3 d = axis / len;
  // stable perpendicular frame with (u, v, d) right-handed
  const Vec3 pick = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = d.cross(pick).normalized();
  const Vec3 v = d.cross(u);

  Tube tube;
  const int n_side = n_ring * n_rings_along;
  const int n_total = n_side + (cap_a ? 1 : 0) + (cap_b ? 1 : 0);
  tube.mesh.vertices.resize(n_total, 3);
  tube.ring_centers.resize(n_rings_along, 3);
  tube.rings.resize(static_cast<size_t>(n_rings_along));
  for (int i = 0; i < n_rings_along; ++i) {
    const double t = double(i) / double(n_rings_along - 1);
    const Vec3 center = a + t * axis;
    const double r = (1 - t) * radius_a + t * radius_b;
    tube.ring_centers.row(i) = center.transpose();
    tube.rings[static_cast<size_t>(i)].resize(static_cast<size_t>(n_ring));
    for (int k = 0; k < n_ring; ++k) {
      const double phi = 2.0 * EIGEN_PI * k / n_ring;
      const int idx = i * n_ring + k;
      tube.rings[static_cast<size_t>(i)][static_cast<size_t>(k)] = idx;
      tube.mesh.vertices.row(idx) =
          (center + r * (std::cos(phi) * u + std::sin(phi) * v)).transpose();
    }
  }

  std::vector<int> faces;
  auto tri = [&](int x, int y, int z) {
    faces.push_back(x);
    faces.push_back(y);
    faces.push_back(z);
  };
  for (int i = 0; i + 1 < n_rings_along; ++i) {
    for (int k = 0; k < n_ring; ++k) {
      const int k1 = (k + 1) % n_ring;
      const int a0 = i * n_ring + k, a1 = i * n_ring + k1;
      const int b0 = (i + 1) * n_ring + k, b1 = (i + 1) * n_ring + k1;
      tri(a0, a1, b1);
      tri(a0, b1, b0);
    }
  }
  int next = n_side;
  if (cap_a) {
    const int apex = next++;
    tube.mesh.vertices.row(apex) = a.transpose();
    for (int k = 0; k < n_ring; ++k) tri(apex, (k + 1) % n_ring, k);
  }
  if (cap_b) {
    const int apex = next++;
    tube.mesh.vertices.row(apex) = b.transpose();
    const int base = (n_rings_along - 1) * n_ring;
    for (int k = 0; k < n_ring; ++k) tri(apex, base + k, base + (k + 1) % n_ring);
  }
  tube.mesh.faces.resize(Index(faces.size() / 3), 3);
  for (size_t f = 0; f < faces.size() / 3; ++f) {
    tube.mesh.faces.row(Index(f)) << faces[3 * f], faces[3 * f + 1], faces[3 * f + 2];
  }
  return tube;
}

int append_mesh(Mesh& base, const Mesh& piece, int fill_label) {
  const int offset = int(base.vertex_count());
  const Index nv = piece.vertex_count();
  base.vertices.conservativeResize(offset + nv, 3);
  base.vertices.bottomRows(nv) = piece.vertices;
  const Index base_faces = base.faces.rows();
  base.faces.conservativeResize(base_faces + piece.face_count(), 3);
  base.faces.bottomRows(piece.face_count()) = (piece.faces.array() + offset).matrix();
  if (base.has_labels() || piece.has_labels()) {
    base.labels.resize(static_cast<size_t>(offset), fill_label);
    if (piece.has_labels()) {
      base.labels.insert(base.labels.end(), piece.labels.begin(), piece.labels.end());
    } else {
      base.labels.resize(static_cast<size_t>(offset + nv), fill_label);
    }
  }
  return offset;
}

}  // namespace gskin
