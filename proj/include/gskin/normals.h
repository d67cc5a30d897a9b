#pragma once

#include <vector>

#include "gskin/mesh.h"

namespace gskin {

// Area-weighted vertex normals: per face, the un-normalized cross product
// (twice the area times the unit normal) is accumulated at each corner, then
// each row is normalized. Vertices whose accumulation has (near) zero norm are
// left as the zero vector and flagged in `degenerate` when provided.
template <typename Scalar>
PointsT<Scalar> vertex_normals(const MeshT<Scalar>& mesh,
                               std::vector<bool>* degenerate = nullptr) {
  validate_mesh(mesh);
  PointsT<Scalar> normals = PointsT<Scalar>::Zero(mesh.vertex_count(), 3);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const Vec3T<Scalar> a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3T<Scalar> b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3T<Scalar> c = mesh.vertices.row(mesh.faces(f, 2));
    const Vec3T<Scalar> fn = (b - a).cross(c - a);
    for (int k = 0; k < 3; ++k) normals.row(mesh.faces(f, k)) += fn.transpose();
  }
  if (degenerate) degenerate->assign(static_cast<size_t>(mesh.vertex_count()), false);
  const Scalar tiny = Scalar(1e-20);
  for (Index i = 0; i < normals.rows(); ++i) {
    const Scalar n = normals.row(i).norm();
    if (n > tiny) {
      normals.row(i) /= n;
    } else {
      normals.row(i).setZero();
      if (degenerate) (*degenerate)[static_cast<size_t>(i)] = true;
    }
  }
  return normals;
}

}  // namespace gskin
